#include "lossgame/mc_validation.hpp"

#include <array>
#include <functional>
#include <queue>
#include <random>

#include "lossgame/errors.hpp"
#include "lossgame/wardrop.hpp"
#include "parallel.hpp"

namespace lossgame {

namespace {

constexpr double kZ95 = 1.96;

}  // namespace

SimEstimate simulate_loss(int servers, double arrival_rate, double service_rate,
                          std::uint64_t horizon_arrivals, std::uint64_t seed, ServiceLaw law) {
  if (servers < 1) throw DomainError("simulation needs at least one server");
  if (!(arrival_rate > 0.0) || !(service_rate > 0.0)) throw DomainError("rates must be positive");
  if (horizon_arrivals < kMinHorizon) throw DomainError("horizon must be at least 10^4 arrivals");

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(arrival_rate);
  std::exponential_distribution<double> service(service_rate);
  std::priority_queue<double, std::vector<double>, std::greater<>> departures;

  const auto warmup = static_cast<std::uint64_t>(kWarmupFraction * horizon_arrivals);
  const std::uint64_t batch_size = (horizon_arrivals - warmup) / kBatchCount;
  std::vector<double> batch_blocked(kBatchCount, 0.0);

  double t = 0.0;
  const std::uint64_t used = warmup + batch_size * kBatchCount;
  for (std::uint64_t i = 0; i < used; ++i) {
    t += gap(rng);
    while (!departures.empty() && departures.top() <= t) departures.pop();
    const bool blocked = departures.size() >= static_cast<std::size_t>(servers);
    if (!blocked) {
      departures.push(t + (law == ServiceLaw::Exponential ? service(rng) : 1.0 / service_rate));
    }
    if (i >= warmup && blocked) batch_blocked[(i - warmup) / batch_size] += 1.0;
  }

  double mean = 0.0;
  for (double& b : batch_blocked) {
    b /= static_cast<double>(batch_size);
    mean += b;
  }
  mean /= kBatchCount;
  double var = 0.0;
  for (double b : batch_blocked) var += (b - mean) * (b - mean);
  var /= kBatchCount - 1;

  SimEstimate out;
  out.blocked_fraction = mean;
  out.half_width_95 = kZ95 * std::sqrt(var / kBatchCount);
  out.arrivals_observed = batch_size * kBatchCount;
  return out;
}

std::vector<BlockReport> validate_rates(const SystemSpec& spec, const Partition& p,
                                        const std::vector<double>& rates,
                                        std::uint64_t horizon, std::uint64_t seed) {
  validate_partition(spec, p);
  if (rates.size() != p.size()) throw DomainError("need one rate per block");
  const double target = wardrop_cached(spec, p).common_blocking;
  std::vector<BlockReport> out(p.size());
  detail::parallel_for(p.size(), [&](std::size_t b) {
    std::seed_seq mix{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b)};
    std::array<std::uint32_t, 2> words{};
    mix.generate(words.begin(), words.end());
    const std::uint64_t block_seed = (std::uint64_t{words[0]} << 32) | words[1];
    BlockReport r;
    r.block = p[b];
    r.rate = rates[b];
    r.analytic = target;
    r.estimate = simulate_loss(server_count(spec, p[b]), rates[b], spec.service_rate(), horizon,
                               block_seed);
    r.covered = r.estimate.covers(target);
    out[b] = r;
  });
  return out;
}

std::vector<BlockReport> validate_we(const SystemSpec& spec, const Partition& p,
                                     std::uint64_t horizon, std::uint64_t seed) {
  return validate_rates(spec, p, wardrop_cached(spec, p).rates, horizon, seed);
}

}  // namespace lossgame
