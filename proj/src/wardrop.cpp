#include "lossgame/wardrop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "lossgame/erlang.hpp"
#include "lossgame/errors.hpp"

namespace lossgame {

namespace {

constexpr int kMaxOuterBisection = 400;
constexpr std::size_t kCacheSoftLimit = 2'000'000;

class WardropCache {
 public:
  static WardropCache& instance() {
    static WardropCache cache;
    return cache;
  }

  WardropResult get_or_solve(const SystemSpec& spec, const Partition& p) {
    std::string key = spec.key();
    key += '|';
    key += p.rgs_string();
    {
      std::shared_lock lock(mutex_);
      if (auto it = table_.find(key); it != table_.end()) return it->second;
    }
    WardropResult solved = wardrop_split(spec, p);
    std::unique_lock lock(mutex_);
    if (table_.size() >= kCacheSoftLimit) table_.clear();
    return table_.emplace(std::move(key), std::move(solved)).first->second;
  }

  void clear() {
    std::unique_lock lock(mutex_);
    table_.clear();
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return table_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, WardropResult> table_;
};

double log_sum_exp(const std::vector<double>& terms) {
  const double hi = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - hi);
  return hi + std::log(s);
}

// log(x^n / n!) for x > 0.
double log_term(double log_x, int n) { return n * log_x - std::lgamma(n + 1.0); }

// log sum_{j=0}^{n} x^j / j!
double log_partial_exp(double log_x, int n) {
  std::vector<double> terms(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) terms[static_cast<std::size_t>(j)] = log_term(log_x, j);
  return log_sum_exp(terms);
}

}  // namespace

WardropResult wardrop_split(const SystemSpec& spec, const Partition& p) {
  validate_partition(spec, p);
  const double load = spec.offered_load();
  const double mu = spec.service_rate();

  WardropResult out;
  if (p.size() == 1) {
    out.rates = {spec.total_rate()};
    out.log_common_blocking = log_erlang_b(spec.total_servers(), load);
    out.common_blocking = std::exp(out.log_common_blocking);
    return out;
  }

  std::vector<int> counts;
  counts.reserve(p.size());
  for (CoalitionSet c : p.blocks()) counts.push_back(server_count(spec, c));
  const int largest = *std::max_element(counts.begin(), counts.end());

  // B* is at least the pooled (grand coalition) blocking and at most the
  // blocking of the largest block when it carries the whole load.
  double lo = log_erlang_b(spec.total_servers(), load);
  double hi = log_erlang_b(largest, load);

  const std::size_t k = counts.size();
  std::vector<double> x_lo(k), x_hi(k), x_mid(k);
  for (std::size_t i = 0; i < k; ++i) {
    x_lo[i] = std::log(inverse_erlang_b_log(counts[i], lo).value());
    x_hi[i] = std::log(inverse_erlang_b_log(counts[i], hi).value());
  }

  auto loads_at = [&](double log_b) {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      x_mid[i] = detail::solve_log_load(counts[i], log_b, x_lo[i], x_hi[i]);
      total += std::exp(x_mid[i]);
    }
    return total;
  };

  double mid = 0.5 * (lo + hi);
  bool converged = false;
  for (int it = 0; it < kMaxOuterBisection; ++it) {
    mid = 0.5 * (lo + hi);
    const double total = loads_at(mid);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid)) ||
        mid <= lo || mid >= hi) {
      converged = true;
      break;
    }
    if (total < load) {
      lo = mid;
      x_lo = x_mid;
    } else {
      hi = mid;
      x_hi = x_mid;
    }
  }
  if (!converged) throw NoConvergenceError("Wardrop bisection on the common blocking did not close");

  out.rates.resize(k);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out.rates[i] = mu * std::exp(x_mid[i]);
    sum += out.rates[i];
  }
  // Uniform rescale: exact feasibility to rounding, and identical blocks stay
  // bitwise identical.
  const double scale = spec.total_rate() / sum;
  for (double& r : out.rates) r *= scale;

  out.log_common_blocking = mid;
  out.common_blocking = std::exp(mid);
  double resid = std::abs(std::accumulate(out.rates.begin(), out.rates.end(), 0.0) -
                          spec.total_rate());
  for (std::size_t i = 0; i < k; ++i) {
    resid = std::max(resid, std::abs(erlang_b(counts[i], out.rates[i] / mu) - out.common_blocking));
  }
  out.residual = resid;
  return out;
}

WardropResult wardrop_cached(const SystemSpec& spec, const Partition& p) {
  return WardropCache::instance().get_or_solve(spec, p);
}

double block_rate(const SystemSpec& spec, const Partition& p, CoalitionSet c) {
  const auto idx = p.find_block(c);
  if (!idx) throw DomainError(to_string(c) + " is not a block of " + p.to_string());
  return wardrop_cached(spec, p).rates[*idx];
}

void clear_wardrop_cache() { WardropCache::instance().clear(); }

std::size_t wardrop_cache_size() { return WardropCache::instance().size(); }

PsiPoint psi(const SystemSpec& spec, int k) {
  const int n = spec.total_servers();
  if (k <= 0 || k >= n) {
    throw DomainError("psi needs 0 < k < N, got k=" + std::to_string(k) +
                      " with N=" + std::to_string(n));
  }
  const SystemSpec duo({k, n - k}, spec.total_rate(), spec.service_rate());
  const WardropResult we = wardrop_cached(duo, Partition::singletons(2));
  // Canonical order puts the larger count first.
  const double lambda_k = k >= n - k ? we.rates[0] : we.rates[1];
  return PsiPoint{k, lambda_k / k, lambda_k};
}

double h_residual(const SystemSpec& spec, int k, double lam) {
  const int n = spec.total_servers();
  if (k <= 0 || k >= n) throw DomainError("h needs 0 < k < N");
  const double total = spec.total_rate();
  if (!(lam >= 0.0 && lam <= total)) throw DomainError("h needs 0 <= lam <= Lambda");
  const double x = lam / spec.service_rate();
  const double y = (total - lam) / spec.service_rate();
  if (x == 0.0) return -1.0;
  if (y == 0.0) return 1.0;
  const double lx = std::log(x);
  const double ly = std::log(y);
  const int m = n - k;
  const double first = log_term(lx, k) + log_partial_exp(ly, m);
  const double second = log_term(ly, m) + log_partial_exp(lx, k);
  if (first >= second) return 1.0 - std::exp(second - first);
  return std::exp(first - second) - 1.0;
}

}  // namespace lossgame
