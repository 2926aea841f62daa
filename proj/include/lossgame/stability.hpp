#pragma once

// Pessimistic anticipated values, the three blocking rules, k* and the
// coalitions attaining it, proportional payoffs, grand-coalition payoffs and
// the RB-PA stability radius.

#include <optional>
#include <vector>

#include "lossgame/model.hpp"

namespace lossgame {

enum class PessimalMode {
  Fast,    // outsiders fully merged: lambda_Q under {Q, N \ Q}
  Oracle,  // exact minimum over every partition containing Q
};

/// Lower bound on what coalition q can secure whatever the outsiders do.
/// Oracle mode throws SizeLimitError when more than 10 agents lie outside q.
double pessimal_rate(const SystemSpec& spec, CoalitionSet q,
                     PessimalMode mode = PessimalMode::Fast);

/// phi_i = N_i / N_C * lambda_C for i in block C.
PayoffVector proportional_payoff(const SystemSpec& spec, const Partition& p);

/// A candidate blocking coalition and how it relates to the partition.
struct CandidateMove {
  CoalitionSet coalition;
  MoveKind kind = MoveKind::General;
};

/// Candidate blockers in deterministic order: mergers, then splits, then
/// general coalitions, each group by ascending bitmask. RB rules yield unions
/// of two or more blocks and proper subsets of single blocks. GB-PA yields
/// every non-empty coalition that is not already a block, labelled Merger or
/// Split when it happens to be one.
std::vector<CandidateMove> candidate_moves(const Partition& p, StabilityRule rule);

/// The witness if coalition `q` blocks `cfg` under `rule`, else nothing.
std::optional<BlockWitness> blocks_config(const SystemSpec& spec, const Configuration& cfg,
                                          CoalitionSet q, MoveKind kind, StabilityRule rule,
                                          PessimalMode mode = PessimalMode::Fast);

struct StabilityVerdict {
  bool stable = true;
  std::optional<BlockWitness> witness;
  StabilityRule rule = StabilityRule::RbIa;
};

/// First blocking candidate in candidate_moves order, if any.
StabilityVerdict is_stable(const SystemSpec& spec, const Configuration& cfg, StabilityRule rule,
                           PessimalMode mode = PessimalMode::Fast);

/// Every blocking candidate, in candidate_moves order.
std::vector<BlockWitness> blocking_coalitions(const SystemSpec& spec, const Configuration& cfg,
                                              StabilityRule rule,
                                              PessimalMode mode = PessimalMode::Fast);

/// RB-IA split stage one: pessimal_rate(q) > N_q / N_C * lambda_C for the block
/// C of `p` that contains q. Payoff-free.
bool passes_split_screen(const SystemSpec& spec, const Partition& p, CoalitionSet q,
                         PessimalMode mode = PessimalMode::Fast);

struct KStarResult {
  std::vector<int> maximizers;     // ascending; empty when no k lies in (N/2, N)
  double psi_max = 0.0;            // Psi at the maximizers; 0 when empty
  std::vector<int> achievable_ks;  // subset sums in (N/2, N), ascending
  /// Psi(N/2) = Lambda/N, present when N is even and N/2 is a subset sum.
  /// Kept apart from the argmax.
  std::optional<double> half_tie_psi;

  /// Smallest maximizer. Throws NoFeasibleKError when there is none.
  int representative() const;
  bool contains(int k) const;
};

/// Relative tolerance for ties in the argmax: tie_tol = 1e-9 * Lambda.
inline constexpr double kTieRelTol = 1e-9;

KStarResult k_star(const SystemSpec& spec);

/// Subset sums of the server counts, ascending, including 0 and N.
std::vector<int> achievable_server_counts(const SystemSpec& spec);

/// Coalitions whose server count is a maximizer of `ks`, ascending by mask.
std::vector<CoalitionSet> c_star(const SystemSpec& spec, const KStarResult& ks);

/// Whether a scan verdict holds for every consistent payoff or only at the
/// proportional payoff it was evaluated at.
enum class VerdictScope { AllPayoffs, ProportionalOnly };

struct ScanRow {
  Partition partition;
  StabilityVerdict verdict;
  VerdictScope scope = VerdictScope::ProportionalOnly;
};

/// Classifies every partition, evaluated at the proportional payoff.
/// Requires n <= 10 (SizeLimitError otherwise). Rows come in
/// restricted-growth-string order.
std::vector<ScanRow> stable_set_scan(const SystemSpec& spec, StabilityRule rule,
                                     PessimalMode mode = PessimalMode::Fast);

/// Margin added to the dominant agent's share in gc_analysis, times Lambda.
inline constexpr double kGrandCoalitionMargin = 1e-6;

/// A payoff making the grand coalition RB-IA-stable, or nothing when the
/// largest agent does not hold a strict majority of the servers (no such
/// payoff exists then). Throws WitnessVerificationError if the constructed
/// payoff fails its own check.
std::optional<PayoffVector> gc_analysis(const SystemSpec& spec);

/// Smallest per-member slack (sum phi_q - pessimal(q)) / |q| over the split
/// candidates of `p`. Transfers within blocks of sup-norm size below the
/// radius keep the configuration RB-PA-stable. Mergers are left out: their
/// worth is the fixed sum of block values, so no consistent payoff changes
/// them. Throws NotStableError if (p, phi) is RB-PA-blocked.
double rb_pa_stability_radius(const SystemSpec& spec, const Partition& p,
                              const PayoffVector& phi);

/// a > b with a relative margin that absorbs rounding in equilibrium sums.
bool strictly_exceeds(double a, double b);

}  // namespace lossgame
