#include "lossgame/dynamics.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <unordered_set>

#include "lossgame/errors.hpp"
#include "lossgame/stability.hpp"
#include "lossgame/wardrop.hpp"

namespace lossgame {

namespace {

constexpr int kMaxA1Agents = 10;

std::string state_key(const Configuration& cfg, double quantum) {
  std::string key = cfg.partition.rgs_string();
  for (double v : cfg.payoff.values) {
    key += ':';
    key += std::to_string(std::llround(v / quantum));
  }
  return key;
}

}  // namespace

A1Check check_a1(const SystemSpec& spec) {
  const int n = spec.agent_count();
  if (n > kMaxA1Agents) {
    throw SizeLimitError("assumption check is limited to " + std::to_string(kMaxA1Agents) +
                         " agents");
  }
  const std::vector<CoalitionSet> stars = c_star(spec, k_star(spec));
  const auto full = CoalitionSet::all(n).mask();

  std::vector<double> per_server(static_cast<std::size_t>(full) + 1, 0.0);
  for (CoalitionSet::mask_type m = 1; m <= full; ++m) {
    const CoalitionSet c(m);
    per_server[m] = pessimal_rate(spec, c) / server_count(spec, c);
  }

  for (CoalitionSet::mask_type m = 1; m <= full; ++m) {
    const CoalitionSet c(m);
    bool holds_star = false;
    for (CoalitionSet s : stars) {
      if (s.subset_of(c)) {
        holds_star = true;
        break;
      }
    }
    if (holds_star) continue;
    for (auto sub = (m - 1) & m; sub != 0; sub = (sub - 1) & m) {
      if (!(per_server[sub] < per_server[m])) {
        return A1Check{false, std::make_pair(c, CoalitionSet(sub))};
      }
    }
  }
  return A1Check{};
}

PayoffVector equal_surplus_update(const SystemSpec& spec, const Configuration& old,
                                  const Partition& next, CoalitionSet q) {
  const WardropResult we = wardrop_cached(spec, next);
  PayoffVector phi = old.payoff;
  for (std::size_t b = 0; b < next.size(); ++b) {
    const CoalitionSet c = next[b];
    const std::vector<int> members = c.members();
    const double before = old.payoff.sum_over(c);
    const double shift = (we.rates[b] - before) / static_cast<double>(members.size());
    bool negative = false;
    for (int a : members) {
      const double v = old.payoff[static_cast<std::size_t>(a)] + shift;
      phi[static_cast<std::size_t>(a)] = v;
      negative = negative || v < 0.0;
    }
    if (negative && c != q) {
      for (int a : members) {
        const double share = before > 0.0 ? old.payoff[static_cast<std::size_t>(a)] / before
                                          : 1.0 / static_cast<double>(members.size());
        phi[static_cast<std::size_t>(a)] = share * we.rates[b];
      }
    }
  }
  return phi;
}

StepOutcome step(const SystemSpec& spec, const Configuration& cfg, StabilityRule rule,
                 std::mt19937_64& rng, const PayoffUpdate& update) {
  if (rule == StabilityRule::GbPa) throw DomainError("dynamics support rb-ia and rb-pa only");
  const std::vector<BlockWitness> blockers = blocking_coalitions(spec, cfg, rule);
  StepOutcome out;
  if (blockers.empty()) {
    out.stable = true;
    return out;
  }
  std::uniform_int_distribution<std::size_t> pick(0, blockers.size() - 1);
  const BlockWitness& w = blockers[pick(rng)];
  Partition next = reform(cfg.partition, w.blocker);
  PayoffVector phi = update(spec, cfg, next, w.blocker);
  out.next = Configuration{std::move(next), std::move(phi)};
  out.chosen = w;
  return out;
}

std::string to_string(Terminal t) {
  switch (t) {
    case Terminal::Stable: return "stable";
    case Terminal::StepCapReached: return "step-cap";
    case Terminal::Cycling: return "cycling";
  }
  return "?";
}

DynamicsTrace run(const SystemSpec& spec, const Configuration& cfg0, StabilityRule rule,
                  std::uint64_t seed, int max_steps, const PayoffUpdate& update) {
  if (max_steps < 0) throw DomainError("max_steps must be non-negative");
  DynamicsTrace trace;
  trace.seed = seed;
  trace.rule = rule;
  trace.steps.push_back({cfg0, std::nullopt});

  std::mt19937_64 rng(seed);
  const double quantum = kCycleQuantum * spec.total_rate();
  std::unordered_set<std::string> seen{state_key(cfg0, quantum)};

  for (int i = 0;; ++i) {
    StepOutcome s = step(spec, trace.steps.back().config, rule, rng, update);
    if (s.stable) {
      trace.terminal = Terminal::Stable;
      return trace;
    }
    if (i == max_steps) {
      trace.terminal = Terminal::StepCapReached;
      return trace;
    }
    const bool revisit = !seen.insert(state_key(*s.next, quantum)).second;
    trace.steps.push_back({std::move(*s.next), s.chosen});
    if (revisit) {
      trace.terminal = Terminal::Cycling;
      return trace;
    }
  }
}

Partition random_partition(int agent_count, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> label(0, agent_count - 1);
  std::vector<CoalitionSet> blocks(static_cast<std::size_t>(agent_count));
  for (int a = 0; a < agent_count; ++a) {
    auto& b = blocks[static_cast<std::size_t>(label(rng))];
    b = b | CoalitionSet::singleton(a);
  }
  std::erase_if(blocks, [](CoalitionSet c) { return c.empty(); });
  return Partition(agent_count, std::move(blocks));
}

void write_trace_csv(std::ostream& out, const SystemSpec& spec, const DynamicsTrace& trace) {
  const int n = spec.agent_count();
  out << "step,partition,blocker,kind";
  for (int a = 0; a < n; ++a) out << ",phi_" << a;
  out << '\n';
  const auto old_precision = out.precision(12);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceEntry& e = trace.steps[i];
    out << i << ',' << to_user_labels(spec, e.config.partition).rgs_string() << ',';
    if (e.chosen) {
      out << to_user_labels(spec, e.chosen->blocker).mask() << ',' << to_string(e.chosen->kind);
    } else {
      out << ",";
    }
    for (double v : to_user_labels(spec, e.config.payoff)) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace lossgame
