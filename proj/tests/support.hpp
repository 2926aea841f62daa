#pragma once

// Independent reference computations and random generators shared by tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lossgame/lossgame.hpp"

namespace testsupport {

// log B(n, a) from the factorial sums  (a^n/n!) / sum_{j<=n} a^j/j!,
// evaluated with log-sum-exp.
inline double log_erlang_factorial(int n, double a) {
  const double la = std::log(a);
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) t[static_cast<std::size_t>(j)] = j * la - std::lgamma(j + 1.0);
  const double hi = *std::max_element(t.begin(), t.end());
  double s = 0.0;
  for (double x : t) s += std::exp(x - hi);
  return t.back() - (hi + std::log(s));
}

inline double erlang_factorial(int n, double a) { return std::exp(log_erlang_factorial(n, a)); }

// Bell numbers from the Bell triangle.
inline std::vector<std::uint64_t> bell_numbers(int up_to) {
  std::vector<std::uint64_t> bell{1};
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= up_to; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    bell.push_back(next.front());
    row = std::move(next);
  }
  return bell;
}

// Root of h(lam) on [0, Lambda] by plain bisection on the sign of h_residual.
inline double h_root(const lossgame::SystemSpec& spec, int k) {
  double lo = 0.0;
  double hi = spec.total_rate();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (lossgame::h_residual(spec, k, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// A random consistent payoff: each block value split by uniform random weights.
inline lossgame::PayoffVector random_payoff(const lossgame::SystemSpec& spec,
                                            const lossgame::Partition& p, std::mt19937_64& rng) {
  const lossgame::WardropResult we = lossgame::wardrop_cached(spec, p);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  lossgame::PayoffVector phi;
  phi.values.assign(static_cast<std::size_t>(spec.agent_count()), 0.0);
  for (std::size_t b = 0; b < p.size(); ++b) {
    const auto members = p[b].members();
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      w.push_back(u(rng));
      total += w.back();
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      phi.values[static_cast<std::size_t>(members[i])] = w[i] / total * we.rates[b];
    }
  }
  return phi;
}

// Random server counts: n agents with 1..max_servers servers each.
inline std::vector<int> random_counts(std::mt19937_64& rng, int n, int max_servers) {
  std::uniform_int_distribution<int> d(1, max_servers);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int& c : out) c = d(rng);
  return out;
}

inline int larger_side(const lossgame::SystemSpec& spec, const lossgame::Partition& p) {
  int best = 0;
  for (lossgame::CoalitionSet c : p.blocks()) best = std::max(best, lossgame::server_count(spec, c));
  return best;
}

}  // namespace testsupport
