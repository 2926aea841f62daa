#pragma once

// Random coalition formation: at each step one blocking coalition, chosen
// uniformly among all that block, forms and payoffs are reallocated.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "lossgame/model.hpp"

namespace lossgame {

struct A1Check {
  bool holds = true;
  /// (C, S) with S a strict subset of C and pessimal(S)/N_S >= pessimal(C)/N_C.
  std::optional<std::pair<CoalitionSet, CoalitionSet>> counterexample;
};

/// Checks, for every coalition C holding no member of C* as a subset, that
/// each strict subset S has a strictly smaller pessimal per-server rate.
/// Requires n <= 10.
A1Check check_a1(const SystemSpec& spec);

/// Reallocates payoffs after coalition `q` forms, moving from `old` to
/// partition `next`.
using PayoffUpdate = std::function<PayoffVector(const SystemSpec&, const Configuration& old,
                                                const Partition& next, CoalitionSet q)>;

/// Every block of `next` receives its new value with the change spread equally
/// among its members. If that would leave someone outside `q` with a negative
/// payoff, that block is instead rescaled in proportion to the old payoffs.
PayoffVector equal_surplus_update(const SystemSpec& spec, const Configuration& old,
                                  const Partition& next, CoalitionSet q);

struct StepOutcome {
  bool stable = false;
  std::optional<Configuration> next;  // empty when stable
  std::optional<BlockWitness> chosen;
};

/// One move under RB-IA or RB-PA (DomainError for GB-PA).
StepOutcome step(const SystemSpec& spec, const Configuration& cfg, StabilityRule rule,
                 std::mt19937_64& rng, const PayoffUpdate& update = equal_surplus_update);

enum class Terminal { Stable, StepCapReached, Cycling };
std::string to_string(Terminal t);

struct TraceEntry {
  Configuration config;
  std::optional<BlockWitness> chosen;  // the move that led here; empty at the start
};

struct DynamicsTrace {
  std::vector<TraceEntry> steps;
  Terminal terminal = Terminal::StepCapReached;
  std::uint64_t seed = 0;
  StabilityRule rule = StabilityRule::RbIa;

  /// Number of moves taken.
  std::size_t length() const noexcept { return steps.empty() ? 0 : steps.size() - 1; }
  const Configuration& final_config() const { return steps.back().config; }
};

inline constexpr int kDefaultMaxSteps = 10'000;

/// Payoff quantum for cycle detection, times Lambda.
inline constexpr double kCycleQuantum = 1e-9;

/// Iterates step() from cfg0 until stable, a revisited (partition, quantised
/// payoff) state, or max_steps moves.
DynamicsTrace run(const SystemSpec& spec, const Configuration& cfg0, StabilityRule rule,
                  std::uint64_t seed, int max_steps = kDefaultMaxSteps,
                  const PayoffUpdate& update = equal_surplus_update);

/// A random partition of n agents: each agent draws a block label uniformly.
Partition random_partition(int agent_count, std::mt19937_64& rng);

/// Comma-separated trace, one line per state after a header:
/// step,partition,blocker,kind,phi_0,...,phi_{n-1}
/// The partition is a restricted-growth string and the blocker a bitmask,
/// both over the caller's agent labels, as are the payoff columns.
void write_trace_csv(std::ostream& out, const SystemSpec& spec, const DynamicsTrace& trace);

}  // namespace lossgame
