#pragma once

// Heavy- and light-traffic approximations of the duopoly equilibrium and the
// closed-form k* in both limits.

#include <optional>
#include <vector>

#include "lossgame/model.hpp"
#include "lossgame/stability.hpp"

namespace lossgame {

/// k Lambda / N: equal per-server rates, the leading-order heavy-traffic split.
double first_order_we(double k, int total_servers, double total_rate);

enum class ApproxOrder { First, Second };

struct ApproxWE {
  double lambda_hat = 0.0;
  ApproxOrder order = ApproxOrder::Second;
  int iterations = 0;
  double residual = 0.0;  // |lambda - T(lambda)| at the returned point, offered-load units
};

inline constexpr int kMaxFixedPointIterations = 10'000;

/// Rate of the k-server side when 1/B is expanded to second order in 1/a on
/// both sides of a duopoly {k, N-k}. Solves, in offered-load units a = lambda/mu,
///   a1 / k = a2 / (N-k) * (1 + (k-1)/a1) / (1 + (N-k-1)/a2),  a2 = A - a1,
/// by damped iteration from the first-order value, falling back to bisection
/// on the residual. k may be real, 1 <= k <= N - 1 (DomainError otherwise). The service rate defaults to 1.
ApproxWE second_order_we(double k, int total_servers, double total_rate,
                         double service_rate = 1.0);

/// N - N_n: every agent but the smallest. Requires at least two agents.
int heavy_k_star(const SystemSpec& spec);

/// Least subset sum strictly between N/2 and N. Throws NoFeasibleKError when
/// there is none.
int light_k_star(const SystemSpec& spec);

struct RegimeRow {
  double total_rate = 0.0;
  KStarResult k_star;
  double grand_blocking = 0.0;  // B(N, Lambda/mu)
  bool matches_heavy = false;   // maximizers == {heavy_k_star}
  bool matches_light = false;   // maximizers == {light_k_star}
};

struct RegimeTable {
  std::vector<RegimeRow> rows;
  /// First grid rate from which every later row matches the heavy-traffic
  /// formula. Empirical; says nothing about the theoretical threshold.
  std::optional<double> heavy_crossover;
  /// Last grid rate up to which every row matches the light-traffic formula.
  std::optional<double> light_crossover;
};

/// Exact k* along an ascending grid of total rates (DomainError otherwise).
RegimeTable regime_crosscheck(const SystemSpec& spec, const std::vector<double>& rate_grid);

}  // namespace lossgame
