#include "lossgame/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lossgame/errors.hpp"
#include "lossgame/partitions.hpp"
#include "lossgame/wardrop.hpp"
#include "parallel.hpp"

namespace lossgame {

namespace {

constexpr double kStrictRelMargin = 1e-11;
constexpr int kMaxOracleOutside = 10;
constexpr int kMaxScanAgents = 10;
constexpr int kMaxSubsetAgents = 20;

double sum_block_rates(const SystemSpec& spec, const Partition& p, CoalitionSet q) {
  const WardropResult we = wardrop_cached(spec, p);
  double s = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) {
    if (p[b].subset_of(q)) s += we.rates[b];
  }
  return s;
}

bool is_union_of_blocks(const Partition& p, CoalitionSet q) {
  for (CoalitionSet c : p.blocks()) {
    if (c.intersects(q) && !c.subset_of(q)) return false;
  }
  return true;
}

}  // namespace

bool strictly_exceeds(double a, double b) {
  return a - b > kStrictRelMargin * std::max(std::abs(a), std::abs(b));
}

double pessimal_rate(const SystemSpec& spec, CoalitionSet q, PessimalMode mode) {
  const int n = spec.agent_count();
  const CoalitionSet everyone = CoalitionSet::all(n);
  if (q.empty()) throw DomainError("pessimal rate needs a non-empty coalition");
  if (!q.subset_of(everyone)) throw DomainError("coalition names agents outside the system");
  if (q == everyone) return spec.total_rate();

  if (mode == PessimalMode::Fast) {
    const Partition duo(n, {q, everyone - q});
    return block_rate(spec, duo, q);
  }
  if (n - q.size() > kMaxOracleOutside) {
    throw SizeLimitError("oracle pessimal rate enumerates at most " +
                         std::to_string(kMaxOracleOutside) + " outside agents");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Partition& p : enumerate_partitions_containing(n, q)) {
    best = std::min(best, block_rate(spec, p, q));
  }
  return best;
}

PayoffVector proportional_payoff(const SystemSpec& spec, const Partition& p) {
  validate_partition(spec, p);
  const WardropResult we = wardrop_cached(spec, p);
  PayoffVector phi;
  phi.values.assign(static_cast<std::size_t>(spec.agent_count()), 0.0);
  for (std::size_t b = 0; b < p.size(); ++b) {
    const double n_c = server_count(spec, p[b]);
    for (int a : p[b].members()) {
      phi.values[static_cast<std::size_t>(a)] = spec.servers(a) / n_c * we.rates[b];
    }
  }
  return phi;
}

std::vector<CandidateMove> candidate_moves(const Partition& p, StabilityRule rule) {
  std::vector<CandidateMove> mergers;
  std::vector<CandidateMove> splits;
  std::vector<CandidateMove> general;

  if (rule == StabilityRule::GbPa) {
    const auto full = CoalitionSet::all(p.agent_count()).mask();
    for (CoalitionSet::mask_type m = 1; m <= full && m != 0; ++m) {
      const CoalitionSet q(m);
      if (p.contains_block(q)) continue;
      if (is_union_of_blocks(p, q)) {
        mergers.push_back({q, MoveKind::Merger});
      } else if (q.subset_of(p[p.block_index_of(q.lowest())])) {
        splits.push_back({q, MoveKind::Split});
      } else {
        general.push_back({q, MoveKind::General});
      }
    }
  } else {
    const std::size_t k = p.size();
    for (std::uint64_t pick = 1; pick < (std::uint64_t{1} << k); ++pick) {
      if (std::popcount(pick) < 2) continue;
      CoalitionSet q;
      for (std::size_t b = 0; b < k; ++b) {
        if ((pick >> b) & 1U) q = q | p[b];
      }
      mergers.push_back({q, MoveKind::Merger});
    }
    for (CoalitionSet c : p.blocks()) {
      // Proper non-empty submasks of c.
      for (auto sub = (c.mask() - 1) & c.mask(); sub != 0; sub = (sub - 1) & c.mask()) {
        splits.push_back({CoalitionSet(sub), MoveKind::Split});
      }
    }
  }
  auto by_mask = [](const CandidateMove& a, const CandidateMove& b) {
    return a.coalition < b.coalition;
  };
  std::sort(mergers.begin(), mergers.end(), by_mask);
  std::sort(splits.begin(), splits.end(), by_mask);
  std::sort(general.begin(), general.end(), by_mask);

  std::vector<CandidateMove> out;
  out.reserve(mergers.size() + splits.size() + general.size());
  out.insert(out.end(), mergers.begin(), mergers.end());
  out.insert(out.end(), splits.begin(), splits.end());
  out.insert(out.end(), general.begin(), general.end());
  return out;
}

bool passes_split_screen(const SystemSpec& spec, const Partition& p, CoalitionSet q,
                         PessimalMode mode) {
  const std::size_t b = p.block_index_of(q.lowest());
  const CoalitionSet c = p[b];
  if (!q.proper_subset_of(c)) throw DomainError(to_string(q) + " is not a split of a block");
  const double lambda_c = wardrop_cached(spec, p).rates[b];
  const double share =
      static_cast<double>(server_count(spec, q)) / server_count(spec, c) * lambda_c;
  return strictly_exceeds(pessimal_rate(spec, q, mode), share);
}

std::optional<BlockWitness> blocks_config(const SystemSpec& spec, const Configuration& cfg,
                                          CoalitionSet q, MoveKind kind, StabilityRule rule,
                                          PessimalMode mode) {
  const Partition& p = cfg.partition;
  if (kind == MoveKind::General && rule != StabilityRule::GbPa) {
    throw DomainError("restricted rules only consider mergers and splits");
  }

  if (kind == MoveKind::Split && rule == StabilityRule::RbIa) {
    if (!passes_split_screen(spec, p, q, mode)) return std::nullopt;
    const double realised = block_rate(spec, reform(p, q), q);
    const double worth = cfg.payoff.sum_over(q);
    if (!strictly_exceeds(realised, worth)) return std::nullopt;
    return BlockWitness{q, kind, realised, worth};
  }

  const double anticipated = pessimal_rate(spec, q, mode);
  // A merger's members hold exactly the merged block values whatever the
  // payoff split, so compare against those directly.
  const double worth =
      kind == MoveKind::Merger ? sum_block_rates(spec, p, q) : cfg.payoff.sum_over(q);
  if (!strictly_exceeds(anticipated, worth)) return std::nullopt;
  return BlockWitness{q, kind, anticipated, worth};
}

namespace {

template <typename OnWitness>
void scan_candidates(const SystemSpec& spec, const Configuration& cfg, StabilityRule rule,
                     PessimalMode mode, OnWitness&& on_witness) {
  validate_partition(spec, cfg.partition);
  check_payoff_consistency(spec, cfg.partition, wardrop_cached(spec, cfg.partition), cfg.payoff);
  for (const CandidateMove& m : candidate_moves(cfg.partition, rule)) {
    if (auto w = blocks_config(spec, cfg, m.coalition, m.kind, rule, mode)) {
      if (!on_witness(*w)) return;
    }
  }
}

}  // namespace

StabilityVerdict is_stable(const SystemSpec& spec, const Configuration& cfg, StabilityRule rule,
                           PessimalMode mode) {
  StabilityVerdict v;
  v.rule = rule;
  scan_candidates(spec, cfg, rule, mode, [&](const BlockWitness& w) {
    v.stable = false;
    v.witness = w;
    return false;
  });
  return v;
}

std::vector<BlockWitness> blocking_coalitions(const SystemSpec& spec, const Configuration& cfg,
                                              StabilityRule rule, PessimalMode mode) {
  std::vector<BlockWitness> out;
  scan_candidates(spec, cfg, rule, mode, [&](const BlockWitness& w) {
    out.push_back(w);
    return true;
  });
  return out;
}

// k*

int KStarResult::representative() const {
  if (maximizers.empty()) throw NoFeasibleKError("no server count lies strictly between N/2 and N");
  return maximizers.front();
}

bool KStarResult::contains(int k) const {
  return std::binary_search(maximizers.begin(), maximizers.end(), k);
}

std::vector<int> achievable_server_counts(const SystemSpec& spec) {
  const int n_total = spec.total_servers();
  std::vector<char> reach(static_cast<std::size_t>(n_total) + 1, 0);
  reach[0] = 1;
  for (int c : spec.server_counts()) {
    for (int s = n_total; s >= c; --s) {
      if (reach[static_cast<std::size_t>(s - c)]) reach[static_cast<std::size_t>(s)] = 1;
    }
  }
  std::vector<int> out;
  for (int s = 0; s <= n_total; ++s) {
    if (reach[static_cast<std::size_t>(s)]) out.push_back(s);
  }
  return out;
}

KStarResult k_star(const SystemSpec& spec) {
  const int n_total = spec.total_servers();
  KStarResult out;
  std::vector<double> psis;
  for (int k : achievable_server_counts(spec)) {
    if (2 * k == n_total) out.half_tie_psi = psi(spec, k).psi;
    if (2 * k > n_total && k < n_total) {
      out.achievable_ks.push_back(k);
      psis.push_back(psi(spec, k).psi);
    }
  }
  if (psis.empty()) return out;
  out.psi_max = *std::max_element(psis.begin(), psis.end());
  const double tie_tol = kTieRelTol * spec.total_rate();
  for (std::size_t i = 0; i < psis.size(); ++i) {
    if (psis[i] >= out.psi_max - tie_tol) out.maximizers.push_back(out.achievable_ks[i]);
  }
  return out;
}

std::vector<CoalitionSet> c_star(const SystemSpec& spec, const KStarResult& ks) {
  const int n = spec.agent_count();
  if (n > kMaxSubsetAgents) {
    throw SizeLimitError("coalition enumeration is limited to " +
                         std::to_string(kMaxSubsetAgents) + " agents");
  }
  std::vector<CoalitionSet> out;
  const auto full = CoalitionSet::all(n).mask();
  for (CoalitionSet::mask_type m = 1; m <= full; ++m) {
    const CoalitionSet c(m);
    if (ks.contains(server_count(spec, c))) out.push_back(c);
  }
  return out;
}

// Scans

std::vector<ScanRow> stable_set_scan(const SystemSpec& spec, StabilityRule rule,
                                     PessimalMode mode) {
  const int n = spec.agent_count();
  if (n > kMaxScanAgents) {
    throw SizeLimitError("stability scans are limited to " + std::to_string(kMaxScanAgents) +
                         " agents, got " + std::to_string(n));
  }
  const std::vector<Partition> parts = enumerate_partitions(n);
  std::vector<ScanRow> rows(parts.size(), ScanRow{Partition::grand(n), {}, {}});

  detail::parallel_for(parts.size(), [&](std::size_t i) {
    const Partition& p = parts[i];
    const Configuration cfg{p, proportional_payoff(spec, p)};
    ScanRow row{p, is_stable(spec, cfg, rule, mode), VerdictScope::ProportionalOnly};
    if (row.verdict.witness && row.verdict.witness->kind == MoveKind::Merger) {
      row.scope = VerdictScope::AllPayoffs;
    } else if (rule == StabilityRule::RbIa && row.verdict.stable) {
      // Mergers do not block, and with no split passing the payoff-free
      // screen nothing can block at any payoff.
      bool screened = false;
      for (const CandidateMove& m : candidate_moves(p, rule)) {
        if (m.kind == MoveKind::Split && passes_split_screen(spec, p, m.coalition, mode)) {
          screened = true;
          break;
        }
      }
      if (!screened) row.scope = VerdictScope::AllPayoffs;
    }
    rows[i] = std::move(row);
  });
  return rows;
}

std::optional<PayoffVector> gc_analysis(const SystemSpec& spec) {
  const int n = spec.agent_count();
  const int n_total = spec.total_servers();
  if (2 * spec.servers(0) <= n_total) return std::nullopt;

  const double total = spec.total_rate();
  const Partition grand = Partition::grand(n);
  const CoalitionSet everyone = CoalitionSet::all(n);

  // Only coalitions holding the dominant agent can pass the split screen;
  // the dominant agent must be paid more than any of them can secure.
  double phi0 = spec.servers(0) * total / n_total;
  for (CoalitionSet::mask_type m = 1; m < everyone.mask(); ++m) {
    const CoalitionSet c(m);
    if (!c.contains(0)) continue;
    if (!passes_split_screen(spec, grand, c)) continue;
    phi0 = std::max(phi0, pessimal_rate(spec, c) + kGrandCoalitionMargin * total);
  }

  PayoffVector phi;
  phi.values.assign(static_cast<std::size_t>(n), 0.0);
  phi.values[0] = std::min(phi0, total);
  if (n > 1) {
    const double each = (total - phi.values[0]) / (n - 1);
    for (int a = 1; a < n; ++a) phi.values[static_cast<std::size_t>(a)] = each;
  }
  const StabilityVerdict v = is_stable(spec, Configuration{grand, phi}, StabilityRule::RbIa);
  if (!v.stable) {
    throw WitnessVerificationError("constructed grand-coalition payoff is blocked by " +
                                   to_string(v.witness->blocker));
  }
  return phi;
}

double rb_pa_stability_radius(const SystemSpec& spec, const Partition& p,
                              const PayoffVector& phi) {
  const Configuration cfg{p, phi};
  const StabilityVerdict v = is_stable(spec, cfg, StabilityRule::RbPa);
  if (!v.stable) {
    throw NotStableError("configuration is blocked by " + to_string(v.witness->blocker));
  }
  double r = std::numeric_limits<double>::infinity();
  for (const CandidateMove& m : candidate_moves(p, StabilityRule::RbPa)) {
    if (m.kind != MoveKind::Split) continue;
    const double slack = phi.sum_over(m.coalition) - pessimal_rate(spec, m.coalition);
    r = std::min(r, slack / m.coalition.size());
  }
  // Within the strictness margin a boundary payoff counts as unblocked.
  return std::max(r, 0.0);
}

}  // namespace lossgame
