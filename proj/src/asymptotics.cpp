#include "lossgame/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lossgame/erlang.hpp"
#include "lossgame/errors.hpp"
#include "parallel.hpp"

namespace lossgame {

namespace {

constexpr double kDamping = 0.5;
constexpr double kFixedPointRelTol = 1e-10;
constexpr int kMaxBisection = 400;

}  // namespace

double first_order_we(double k, int total_servers, double total_rate) {
  if (!(k > 0.0 && k < total_servers)) throw DomainError("first-order split needs 0 < k < N");
  return k * total_rate / total_servers;
}

ApproxWE second_order_we(double k, int total_servers, double total_rate, double service_rate) {
  const double n = total_servers;
  // With fewer than one server on a side the expanded balance equation can
  // lose its root entirely.
  if (!(k >= 1.0 && k <= n - 1.0)) throw DomainError("second-order split needs 1 <= k <= N - 1");
  if (!(total_rate > 0.0) || !(service_rate > 0.0)) {
    throw DomainError("rates must be positive");
  }
  const double load = total_rate / service_rate;
  const double m = n - k;
  auto map = [&](double a1) {
    const double a2 = load - a1;
    return k * a2 / m * (1.0 + (k - 1.0) / a1) / (1.0 + (m - 1.0) / a2);
  };
  const double tol = kFixedPointRelTol * std::max(1.0, load);

  ApproxWE out;
  out.order = ApproxOrder::Second;
  double a1 = k * load / n;
  for (int it = 1; it <= kMaxFixedPointIterations; ++it) {
    const double t = map(a1);
    if (!std::isfinite(t)) break;
    if (std::abs(t - a1) <= tol) {
      out.lambda_hat = a1 * service_rate;
      out.iterations = it;
      out.residual = std::abs(t - a1);
      return out;
    }
    const double next = (1.0 - kDamping) * a1 + kDamping * t;
    if (!(next > 0.0 && next < load)) break;
    a1 = next;
    out.iterations = it;
  }

  // a1 - T(a1) runs from -inf near 0 to +A near A, so it has a sign change.
  double lo = 0.0;
  double hi = load;
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = mid - map(mid);
    if (std::abs(r) <= tol) {
      out.lambda_hat = mid * service_rate;
      out.iterations += it + 1;
      out.residual = std::abs(r);
      return out;
    }
    if (mid <= lo || mid >= hi) break;
    (r < 0.0 ? lo : hi) = mid;
  }
  throw NoConvergenceError("second-order fixed point did not converge for k=" +
                           std::to_string(k));
}

int heavy_k_star(const SystemSpec& spec) {
  if (spec.agent_count() < 2) throw DomainError("heavy-traffic k* needs at least two agents");
  return spec.total_servers() - spec.servers(spec.agent_count() - 1);
}

int light_k_star(const SystemSpec& spec) {
  const int n_total = spec.total_servers();
  for (int k : achievable_server_counts(spec)) {
    if (2 * k > n_total && k < n_total) return k;
  }
  throw NoFeasibleKError("no subset sum lies strictly between N/2 and N");
}

RegimeTable regime_crosscheck(const SystemSpec& spec, const std::vector<double>& rate_grid) {
  if (!std::is_sorted(rate_grid.begin(), rate_grid.end())) {
    throw DomainError("rate grid must be ascending");
  }
  std::optional<int> heavy;
  std::optional<int> light;
  if (spec.agent_count() >= 2) heavy = heavy_k_star(spec);
  try {
    light = light_k_star(spec);
  } catch (const NoFeasibleKError&) {
  }

  RegimeTable table;
  table.rows.resize(rate_grid.size());
  detail::parallel_for(rate_grid.size(), [&](std::size_t i) {
    const SystemSpec at = spec.with_total_rate(rate_grid[i]);
    RegimeRow row;
    row.total_rate = rate_grid[i];
    row.k_star = k_star(at);
    row.grand_blocking = erlang_b(at.total_servers(), at.offered_load());
    const auto& ks = row.k_star.maximizers;
    row.matches_heavy = heavy && ks == std::vector<int>{*heavy};
    row.matches_light = light && ks == std::vector<int>{*light};
    table.rows[i] = std::move(row);
  });

  for (std::size_t i = table.rows.size(); i-- > 0 && table.rows[i].matches_heavy;) {
    table.heavy_crossover = table.rows[i].total_rate;
  }
  for (std::size_t i = 0; i < table.rows.size() && table.rows[i].matches_light; ++i) {
    table.light_crossover = table.rows[i].total_rate;
  }
  return table;
}

}  // namespace lossgame
