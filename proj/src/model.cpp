#include "lossgame/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

#include "lossgame/errors.hpp"

namespace lossgame {

namespace {

std::string hex_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

void check_agent_range(int agent_count) {
  if (agent_count < 1 || agent_count > kMaxAgents) {
    throw DomainError("agent count must be in [1, " + std::to_string(kMaxAgents) +
                      "], got " + std::to_string(agent_count));
  }
}

}  // namespace

// SystemSpec

SystemSpec::SystemSpec(std::vector<int> server_counts, double total_rate,
                       double service_rate)
    : total_rate_(total_rate), service_rate_(service_rate) {
  if (server_counts.empty()) throw DomainError("at least one agent is required");
  check_agent_range(static_cast<int>(server_counts.size()));
  for (int c : server_counts) {
    if (c < 1) throw DomainError("every agent needs at least one server");
  }
  if (!(total_rate > 0.0) || !std::isfinite(total_rate)) {
    throw DomainError("total arrival rate must be positive and finite");
  }
  if (!(service_rate > 0.0) || !std::isfinite(service_rate)) {
    throw DomainError("service rate must be positive and finite");
  }

  original_.resize(server_counts.size());
  std::iota(original_.begin(), original_.end(), 0);
  std::stable_sort(original_.begin(), original_.end(), [&](int a, int b) {
    return server_counts[static_cast<std::size_t>(a)] >
           server_counts[static_cast<std::size_t>(b)];
  });
  counts_.reserve(server_counts.size());
  for (int o : original_) counts_.push_back(server_counts[static_cast<std::size_t>(o)]);
  total_servers_ = std::accumulate(counts_.begin(), counts_.end(), 0);

  std::ostringstream k;
  for (int c : counts_) k << c << ',';
  k << hex_double(total_rate_) << ',' << hex_double(service_rate_);
  key_ = k.str();
}

int SystemSpec::canonical_index(int original) const {
  for (std::size_t i = 0; i < original_.size(); ++i) {
    if (original_[i] == original) return static_cast<int>(i);
  }
  throw DomainError("no agent with label " + std::to_string(original));
}

std::vector<int> SystemSpec::user_server_counts() const {
  std::vector<int> out(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    out[static_cast<std::size_t>(original_[i])] = counts_[i];
  }
  return out;
}

SystemSpec SystemSpec::with_total_rate(double total_rate) const {
  return SystemSpec(user_server_counts(), total_rate, service_rate_);
}

// CoalitionSet

CoalitionSet::CoalitionSet(std::initializer_list<int> agents) {
  for (int a : agents) {
    if (a < 0 || a >= kMaxAgents) throw DomainError("agent index out of range");
    mask_ |= mask_type{1} << a;
  }
}

CoalitionSet CoalitionSet::all(int agent_count) {
  check_agent_range(agent_count);
  if (agent_count == kMaxAgents) return CoalitionSet(~mask_type{0});
  return CoalitionSet((mask_type{1} << agent_count) - 1);
}

CoalitionSet CoalitionSet::singleton(int agent) {
  if (agent < 0 || agent >= kMaxAgents) throw DomainError("agent index out of range");
  return CoalitionSet(mask_type{1} << agent);
}

std::vector<int> CoalitionSet::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (mask_type m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

int server_count(const SystemSpec& spec, CoalitionSet c) {
  int total = 0;
  for (int a : c.members()) total += spec.servers(a);
  return total;
}

std::string to_string(CoalitionSet c) {
  std::string s = "{";
  bool first = true;
  for (int a : c.members()) {
    if (!first) s += ',';
    s += std::to_string(a);
    first = false;
  }
  return s + "}";
}

std::vector<CoalitionSet> canonicalize(std::vector<CoalitionSet> blocks) {
  std::sort(blocks.begin(), blocks.end(), [](CoalitionSet a, CoalitionSet b) {
    return a.lowest() < b.lowest();
  });
  return blocks;
}

// Partition

Partition::Partition(int agent_count, std::vector<CoalitionSet> blocks)
    : agent_count_(agent_count) {
  check_agent_range(agent_count);
  const CoalitionSet everyone = CoalitionSet::all(agent_count);
  CoalitionSet seen;
  for (CoalitionSet b : blocks) {
    if (b.empty()) throw DomainError("partition blocks must be non-empty");
    if (!b.subset_of(everyone)) {
      throw DomainError("block " + lossgame::to_string(b) + " names an agent outside 0.." +
                        std::to_string(agent_count - 1));
    }
    if (b.intersects(seen)) {
      throw OverlapError("agent(s) " + lossgame::to_string(b & seen) +
                         " appear in more than one block");
    }
    seen = seen | b;
  }
  if (seen != everyone) {
    throw CoverageError("agent(s) " + lossgame::to_string(everyone - seen) +
                        " are not assigned to any block");
  }
  blocks_ = canonicalize(std::move(blocks));
}

Partition Partition::grand(int agent_count) {
  return Partition(agent_count, {CoalitionSet::all(agent_count)});
}

Partition Partition::singletons(int agent_count) {
  check_agent_range(agent_count);
  std::vector<CoalitionSet> blocks;
  for (int i = 0; i < agent_count; ++i) blocks.push_back(CoalitionSet::singleton(i));
  return Partition(agent_count, std::move(blocks));
}

Partition Partition::from_rgs(const std::vector<int>& rgs) {
  const int n = static_cast<int>(rgs.size());
  check_agent_range(n);
  std::vector<CoalitionSet> blocks;
  for (int i = 0; i < n; ++i) {
    const int label = rgs[static_cast<std::size_t>(i)];
    if (label < 0 || label > static_cast<int>(blocks.size())) {
      throw DomainError("not a restricted-growth string");
    }
    if (label == static_cast<int>(blocks.size())) blocks.emplace_back();
    blocks[static_cast<std::size_t>(label)] =
        blocks[static_cast<std::size_t>(label)] | CoalitionSet::singleton(i);
  }
  return Partition(n, std::move(blocks));
}

std::size_t Partition::block_index_of(int agent) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].contains(agent)) return i;
  }
  throw DomainError("agent " + std::to_string(agent) + " is not in the partition");
}

std::optional<std::size_t> Partition::find_block(CoalitionSet c) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i] == c) return i;
  }
  return std::nullopt;
}

std::vector<int> Partition::rgs() const {
  // Canonical block order is by smallest member, which is exactly the order
  // in which labels first appear in a restricted-growth string.
  std::vector<int> out(static_cast<std::size_t>(agent_count_));
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (int a : blocks_[b].members()) out[static_cast<std::size_t>(a)] = static_cast<int>(b);
  }
  return out;
}

std::string Partition::rgs_string() const {
  static constexpr char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string s;
  for (int label : rgs()) s += label < 36 ? kDigits[label] : '?';
  return s;
}

std::string Partition::to_string() const {
  std::string s;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (b != 0) s += '|';
    bool first = true;
    for (int a : blocks_[b].members()) {
      if (!first) s += ',';
      s += std::to_string(a);
      first = false;
    }
  }
  return s;
}

Partition validate_partition(const SystemSpec& spec, std::vector<CoalitionSet> blocks) {
  return Partition(spec.agent_count(), std::move(blocks));
}

void validate_partition(const SystemSpec& spec, const Partition& p) {
  if (p.agent_count() != spec.agent_count()) {
    throw CoverageError("partition covers " + std::to_string(p.agent_count()) +
                        " agents but the system has " + std::to_string(spec.agent_count()));
  }
}

Partition reform(const Partition& p, CoalitionSet q) {
  std::vector<CoalitionSet> blocks;
  blocks.reserve(p.size() + 1);
  for (CoalitionSet c : p.blocks()) {
    const CoalitionSet rest = c - q;
    if (!rest.empty()) blocks.push_back(rest);
  }
  blocks.push_back(q);
  return Partition(p.agent_count(), std::move(blocks));
}

// Label conversions

namespace {

CoalitionSet remap(CoalitionSet c, const std::function<int(int)>& f) {
  CoalitionSet out;
  for (int a : c.members()) out = out | CoalitionSet::singleton(f(a));
  return out;
}

}  // namespace

CoalitionSet to_user_labels(const SystemSpec& spec, CoalitionSet canonical) {
  return remap(canonical, [&](int a) { return spec.original_index(a); });
}

CoalitionSet from_user_labels(const SystemSpec& spec, CoalitionSet user) {
  return remap(user, [&](int a) { return spec.canonical_index(a); });
}

Partition to_user_labels(const SystemSpec& spec, const Partition& canonical) {
  std::vector<CoalitionSet> blocks;
  for (CoalitionSet c : canonical.blocks()) blocks.push_back(to_user_labels(spec, c));
  return Partition(canonical.agent_count(), std::move(blocks));
}

Partition from_user_labels(const SystemSpec& spec, const Partition& user) {
  std::vector<CoalitionSet> blocks;
  for (CoalitionSet c : user.blocks()) blocks.push_back(from_user_labels(spec, c));
  return Partition(user.agent_count(), std::move(blocks));
}

Partition parse_partition(int agent_count, const std::string& text) {
  std::vector<CoalitionSet> blocks;
  std::stringstream blocks_in(text);
  std::string block_text;
  while (std::getline(blocks_in, block_text, '|')) {
    CoalitionSet block;
    std::stringstream agents_in(block_text);
    std::string agent_text;
    while (std::getline(agents_in, agent_text, ',')) {
      const auto first = agent_text.find_first_not_of(" \t");
      const auto last = agent_text.find_last_not_of(" \t");
      if (first == std::string::npos) throw ParseError("empty agent in partition \"" + text + "\"");
      const std::string digits = agent_text.substr(first, last - first + 1);
      if (!std::all_of(digits.begin(), digits.end(),
                       [](unsigned char ch) { return std::isdigit(ch) != 0; }) ||
          digits.size() > 3) {
        throw ParseError("bad agent \"" + digits + "\" in partition \"" + text + "\"");
      }
      const int a = std::stoi(digits);
      if (a >= agent_count) {
        throw DomainError("agent " + digits + " out of range for " +
                          std::to_string(agent_count) + " agents");
      }
      if (block.contains(a)) throw OverlapError("agent " + digits + " repeated in a block");
      block = block | CoalitionSet::singleton(a);
    }
    if (block.empty()) throw ParseError("empty block in partition \"" + text + "\"");
    blocks.push_back(block);
  }
  if (!text.empty() && text.back() == '|') throw ParseError("empty block in partition \"" + text + "\"");
  return Partition(agent_count, std::move(blocks));
}

// Payoffs

double PayoffVector::sum_over(CoalitionSet c) const {
  double s = 0.0;
  for (int a : c.members()) s += values.at(static_cast<std::size_t>(a));
  return s;
}

std::vector<double> to_user_labels(const SystemSpec& spec, const PayoffVector& phi) {
  std::vector<double> out(phi.size());
  for (std::size_t a = 0; a < phi.size(); ++a) {
    out[static_cast<std::size_t>(spec.original_index(static_cast<int>(a)))] = phi.values[a];
  }
  return out;
}

void check_payoff_consistency(const SystemSpec& spec, const Partition& p,
                              const WardropResult& we, const PayoffVector& phi) {
  if (phi.size() != static_cast<std::size_t>(spec.agent_count())) {
    throw InconsistentPayoffError("payoff vector has " + std::to_string(phi.size()) +
                                  " entries for " + std::to_string(spec.agent_count()) +
                                  " agents");
  }
  const double tol = feasibility_tolerance(spec.total_rate());
  for (double v : phi.values) {
    if (!(v >= -tol) || !std::isfinite(v)) {
      throw InconsistentPayoffError("payoffs must be non-negative and finite");
    }
  }
  for (std::size_t b = 0; b < p.size(); ++b) {
    const double gap = std::abs(phi.sum_over(p[b]) - we.rates.at(b));
    if (gap > tol) {
      throw InconsistentPayoffError("payoffs of block " + lossgame::to_string(p[b]) +
                                    " miss its equilibrium rate by " + std::to_string(gap));
    }
  }
}

// Enumerations

std::string to_string(StabilityRule rule) {
  switch (rule) {
    case StabilityRule::RbIa: return "rb-ia";
    case StabilityRule::RbPa: return "rb-pa";
    case StabilityRule::GbPa: return "gb-pa";
  }
  return "?";
}

std::string to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::Merger: return "merger";
    case MoveKind::Split: return "split";
    case MoveKind::General: return "general";
  }
  return "?";
}

std::optional<StabilityRule> parse_rule(std::string text) {
  for (char& c : text) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '_') c = '-';
  }
  if (text == "rb-ia") return StabilityRule::RbIa;
  if (text == "rb-pa") return StabilityRule::RbPa;
  if (text == "gb-pa") return StabilityRule::GbPa;
  return std::nullopt;
}

}  // namespace lossgame
