#pragma once

// Domain types shared by every analysis: the system of providers, coalitions,
// partitions of the providers into coalitions, payoff vectors and the
// equilibrium split of the arrival stream.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace lossgame {

inline constexpr int kMaxAgents = 32;

/// Rate-sum feasibility tolerance, 1e-9 * max(1, total rate).
inline double feasibility_tolerance(double total_rate) {
  return 1e-9 * std::max(1.0, total_rate);
}

/// Absolute tolerance on equalised blocking probabilities.
inline constexpr double kBlockingTolerance = 1e-10;

/// Providers with identical servers sharing a Poisson arrival stream.
///
/// Agents are stored in non-increasing order of server count. The order the
/// caller supplied is kept so that reports can use the caller's labels:
/// `original_index(i)` is the caller's label of canonical agent `i`.
class SystemSpec {
 public:
  SystemSpec(std::vector<int> server_counts, double total_rate,
             double service_rate);

  int agent_count() const noexcept { return static_cast<int>(counts_.size()); }
  int servers(int agent) const { return counts_.at(static_cast<std::size_t>(agent)); }
  const std::vector<int>& server_counts() const noexcept { return counts_; }
  int total_servers() const noexcept { return total_servers_; }
  double total_rate() const noexcept { return total_rate_; }
  double service_rate() const noexcept { return service_rate_; }
  double offered_load() const noexcept { return total_rate_ / service_rate_; }

  int original_index(int agent) const {
    return original_.at(static_cast<std::size_t>(agent));
  }
  int canonical_index(int original) const;

  /// Server counts in the caller's original order.
  std::vector<int> user_server_counts() const;

  /// Same providers, different total arrival rate.
  SystemSpec with_total_rate(double total_rate) const;

  /// Stable textual key (exact, hex-float rates) used for memoisation.
  const std::string& key() const noexcept { return key_; }

  friend bool operator==(const SystemSpec& a, const SystemSpec& b) {
    return a.key_ == b.key_ && a.original_ == b.original_;
  }

 private:
  std::vector<int> counts_;
  std::vector<int> original_;
  int total_servers_ = 0;
  double total_rate_ = 0.0;
  double service_rate_ = 0.0;
  std::string key_;
};

/// A set of agents, as a bitmask over canonical agent indices.
class CoalitionSet {
 public:
  using mask_type = std::uint32_t;

  constexpr CoalitionSet() noexcept = default;
  constexpr explicit CoalitionSet(mask_type mask) noexcept : mask_(mask) {}
  CoalitionSet(std::initializer_list<int> agents);

  static CoalitionSet all(int agent_count);
  static CoalitionSet singleton(int agent);

  constexpr mask_type mask() const noexcept { return mask_; }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  int size() const noexcept { return std::popcount(mask_); }
  bool contains(int agent) const noexcept {
    return agent >= 0 && agent < kMaxAgents && ((mask_ >> agent) & 1U) != 0;
  }
  constexpr bool subset_of(CoalitionSet other) const noexcept {
    return (mask_ & ~other.mask_) == 0;
  }
  constexpr bool proper_subset_of(CoalitionSet other) const noexcept {
    return subset_of(other) && mask_ != other.mask_;
  }
  constexpr bool intersects(CoalitionSet other) const noexcept {
    return (mask_ & other.mask_) != 0;
  }
  /// Smallest member; -1 when empty.
  int lowest() const noexcept { return empty() ? -1 : std::countr_zero(mask_); }
  std::vector<int> members() const;

  friend constexpr CoalitionSet operator|(CoalitionSet a, CoalitionSet b) noexcept {
    return CoalitionSet(a.mask_ | b.mask_);
  }
  friend constexpr CoalitionSet operator&(CoalitionSet a, CoalitionSet b) noexcept {
    return CoalitionSet(a.mask_ & b.mask_);
  }
  /// Set difference.
  friend constexpr CoalitionSet operator-(CoalitionSet a, CoalitionSet b) noexcept {
    return CoalitionSet(a.mask_ & ~b.mask_);
  }
  friend constexpr auto operator<=>(CoalitionSet, CoalitionSet) noexcept = default;

 private:
  mask_type mask_ = 0;
};

/// N_C: total servers of the members of `c`.
int server_count(const SystemSpec& spec, CoalitionSet c);

/// "{0,2,3}"
std::string to_string(CoalitionSet c);

/// Blocks sorted by smallest member.
std::vector<CoalitionSet> canonicalize(std::vector<CoalitionSet> blocks);

/// A partition of agents {0..n-1} into disjoint, exhaustive, non-empty blocks,
/// held in canonical order (blocks sorted by smallest member).
class Partition {
 public:
  /// Throws OverlapError, CoverageError, or DomainError (empty block or agent
  /// out of range).
  Partition(int agent_count, std::vector<CoalitionSet> blocks);

  static Partition grand(int agent_count);
  static Partition singletons(int agent_count);
  /// From a restricted-growth string: rgs[i] is the block label of agent i.
  static Partition from_rgs(const std::vector<int>& rgs);

  int agent_count() const noexcept { return agent_count_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  const std::vector<CoalitionSet>& blocks() const noexcept { return blocks_; }
  const CoalitionSet& operator[](std::size_t i) const { return blocks_.at(i); }

  /// Index of the block containing `agent`.
  std::size_t block_index_of(int agent) const;
  std::optional<std::size_t> find_block(CoalitionSet c) const;
  bool contains_block(CoalitionSet c) const { return find_block(c).has_value(); }

  std::vector<int> rgs() const;
  /// Restricted-growth string, one base-36 digit per agent ("00112").
  std::string rgs_string() const;
  /// "0,1|2|3,4"
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  int agent_count_ = 0;
  std::vector<CoalitionSet> blocks_;
};

/// Validates blocks against the spec's agents and returns them as a canonical
/// partition. Throws OverlapError or CoverageError.
Partition validate_partition(const SystemSpec& spec, std::vector<CoalitionSet> blocks);

/// Checks that `p` is a partition of exactly the spec's agents.
void validate_partition(const SystemSpec& spec, const Partition& p);

/// Partition obtained when coalition `q` forms: q becomes a block and every
/// other block loses q's members. Covers mergers, splits and general moves.
Partition reform(const Partition& p, CoalitionSet q);

/// Conversions between canonical agent indices and the caller's labels.
CoalitionSet to_user_labels(const SystemSpec& spec, CoalitionSet canonical);
CoalitionSet from_user_labels(const SystemSpec& spec, CoalitionSet user);
Partition to_user_labels(const SystemSpec& spec, const Partition& canonical);
Partition from_user_labels(const SystemSpec& spec, const Partition& user);

/// Parses "0,1|2|3,4" (blocks separated by '|', agents by ','). Throws
/// ParseError on malformed text, DomainError for agents out of range, and
/// OverlapError/CoverageError as the Partition constructor does.
Partition parse_partition(int agent_count, const std::string& text);

/// Per-agent payoffs, indexed by canonical agent.
struct PayoffVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values.at(i); }
  double& operator[](std::size_t i) { return values.at(i); }
  double sum_over(CoalitionSet c) const;
};

/// Payoffs reordered to the caller's labels.
std::vector<double> to_user_labels(const SystemSpec& spec, const PayoffVector& phi);

/// Wardrop split of the total arrival rate, one rate per partition block in
/// the partition's canonical order.
struct WardropResult {
  std::vector<double> rates;
  double common_blocking = 0.0;
  double log_common_blocking = 0.0;
  double residual = 0.0;
};

/// Throws InconsistentPayoffError unless every payoff is non-negative and
/// block sums match the equilibrium rates within the feasibility tolerance.
void check_payoff_consistency(const SystemSpec& spec, const Partition& p,
                              const WardropResult& we, const PayoffVector& phi);

struct Configuration {
  Partition partition;
  PayoffVector payoff;
};

enum class StabilityRule { RbIa, RbPa, GbPa };
enum class MoveKind { Merger, Split, General };

std::string to_string(StabilityRule rule);
std::string to_string(MoveKind kind);
/// Accepts "rb-ia", "rb-pa", "gb-pa" (case-insensitive, '_' or '-').
std::optional<StabilityRule> parse_rule(std::string text);

/// Records which coalition blocks a configuration and the compared values.
struct BlockWitness {
  CoalitionSet blocker;
  MoveKind kind = MoveKind::General;
  double anticipated_value = 0.0;
  double prevailing_worth = 0.0;
};

}  // namespace lossgame
