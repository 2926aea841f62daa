#pragma once

// Wardrop equilibrium: the split of the total arrival rate across the blocks
// of a partition that equalises their Erlang-B blocking probabilities.

#include <cstddef>

#include "lossgame/model.hpp"

namespace lossgame {

/// Unique equilibrium rates for `p` under `spec`.
///
/// Parametrised by the common blocking probability B*: each block's load is
/// the inverse Erlang-B at B*, and B* is bisected (in log space) until the
/// loads sum to the total. The bracket is exact: B* lies between the grand
/// coalition's blocking and that of the largest block taking all traffic.
WardropResult wardrop_split(const SystemSpec& spec, const Partition& p);

/// Memoised wardrop_split, keyed by (spec key, partition restricted-growth
/// string). Safe to call from several threads. Returns a copy.
WardropResult wardrop_cached(const SystemSpec& spec, const Partition& p);

/// Equilibrium rate of block `c` of `p` (c must be a block of p).
double block_rate(const SystemSpec& spec, const Partition& p, CoalitionSet c);

/// Drops every memoised solve. Mostly for tests and long-running sweeps.
void clear_wardrop_cache();
std::size_t wardrop_cache_size();

/// Per-server utilisation of the coalition with k servers in a duopoly
/// {k, N-k}.
struct PsiPoint {
  int k = 0;
  double psi = 0.0;       // lambda_k / k
  double lambda_k = 0.0;
};

/// Psi(k; Lambda). Only server counts matter with identical servers, so this
/// solves the two-agent system (k, N-k). Requires 0 < k < N.
PsiPoint psi(const SystemSpec& spec, int k);

/// Sign-preserving, normalised form of the duopoly balance function
///   h(x) = x^k/k! sum_{j<=N-k} y^j/j!  -  y^{N-k}/(N-k)! sum_{j<=k} x^j/j!
/// with x = lam/mu, y = (Lambda-lam)/mu, returned as h / max(both terms), so
/// the value lies in [-1, 1]. Evaluated from factorial sums with log-sum-exp;
/// it shares no code with the equilibrium solver and serves as its oracle.
double h_residual(const SystemSpec& spec, int k, double lam);

}  // namespace lossgame
