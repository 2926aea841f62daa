#include "lossgame/erlang.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lossgame/errors.hpp"

namespace lossgame {

namespace {

constexpr int kMaxBisection = 200;
constexpr int kMaxBracketSteps = 64;

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void check_servers(int servers) {
  if (servers < 0) throw DomainError("server count must be non-negative");
}

double log_erlang_b_at(int servers, double log_load) {
  if (log_load < -700.0) {
    // 1/a overflows; carry L(m) = log(1/B(m)) directly, L(0) = 0.
    double l = 0.0;
    for (int m = 1; m <= servers; ++m) l = softplus(std::log(m) - log_load + l);
    return -l;
  }
  // u = 1/B(m) - 1 obeys u(m) = (m/a)(1 + u(m-1)); log1p keeps B near 1
  // accurate. Past 1e200 switch to v * e^shift, where the "+1" is below
  // rounding anyway.
  const double inv_load = std::exp(-log_load);
  double u = 0.0;
  int m = 1;
  for (; m <= servers && u <= 1e200; ++m) u = m * inv_load * (1.0 + u);
  if (m > servers) return -std::log1p(u);
  double shift = std::log(u);
  double v = 1.0;
  for (; m <= servers; ++m) {
    v *= m * inv_load;
    if (v > 1e200 || v < 1e-200) {
      shift += std::log(v);
      v = 1.0;
    }
  }
  return -(std::log(v) + shift);
}

}  // namespace

OfferedLoad::OfferedLoad(double erlangs) : value_(erlangs) {
  if (!(erlangs >= 0.0) || !std::isfinite(erlangs)) {
    throw DomainError("offered load must be finite and non-negative");
  }
}

double erlang_b(int servers, OfferedLoad load) {
  check_servers(servers);
  const double a = load.value();
  double b = 1.0;
  for (int m = 1; m <= servers; ++m) b = a * b / (m + a * b);
  return b;
}

double log_erlang_b(int servers, OfferedLoad load) {
  check_servers(servers);
  if (servers == 0) return 0.0;
  if (load.value() == 0.0) return -std::numeric_limits<double>::infinity();
  return log_erlang_b_at(servers, std::log(load.value()));
}

namespace detail {

double solve_log_load(int servers, double log_target, double lo, double hi) {
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) {
      return mid;
    }
    if (log_erlang_b_at(servers, mid) < log_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NoConvergenceError("inverse Erlang-B bisection did not converge for n=" +
                           std::to_string(servers));
}

}  // namespace detail

OfferedLoad inverse_erlang_b_log(int servers, double log_target) {
  if (servers < 1) throw DomainError("inverse Erlang-B needs at least one server");
  if (!(log_target < 0.0) || !std::isfinite(log_target)) {
    throw DomainError("target blocking probability must lie in (0, 1)");
  }
  // Start from a = 1, or from the light-traffic estimate B ~ a^n / n! when the
  // target is far below B(n, 1), then widen with doubling steps in log a.
  double guess = 0.0;
  if (log_target < log_erlang_b_at(servers, 0.0)) {
    guess = std::min(0.0, (log_target + std::lgamma(servers + 1.0)) / servers);
  }
  double lo = guess;
  double hi = guess;
  double step = std::numbers::ln2;
  int k = 0;
  if (log_erlang_b_at(servers, guess) < log_target) {
    while (log_erlang_b_at(servers, hi) < log_target) {
      lo = hi;
      hi += step;
      step *= 2.0;
      if (++k > kMaxBracketSteps) throw NoConvergenceError("could not bracket inverse Erlang-B");
    }
  } else {
    while (log_erlang_b_at(servers, lo) >= log_target) {
      hi = lo;
      lo -= step;
      step *= 2.0;
      if (++k > kMaxBracketSteps) throw NoConvergenceError("could not bracket inverse Erlang-B");
    }
  }
  return OfferedLoad(std::exp(detail::solve_log_load(servers, log_target, lo, hi)));
}

OfferedLoad inverse_erlang_b(int servers, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw DomainError("target blocking probability must lie in (0, 1)");
  }
  return inverse_erlang_b_log(servers, std::log(target));
}

}  // namespace lossgame
