#pragma once

// Discrete-event simulation of Erlang loss systems, used to check the
// analytic blocking probabilities and equilibrium splits.

#include <cmath>
#include <cstdint>
#include <vector>

#include "lossgame/model.hpp"

namespace lossgame {

enum class ServiceLaw { Exponential, Deterministic };

struct SimEstimate {
  double blocked_fraction = 0.0;
  double half_width_95 = 0.0;  // normal approximation over batch means
  std::uint64_t arrivals_observed = 0;

  bool covers(double p) const { return std::abs(p - blocked_fraction) <= half_width_95; }
};

inline constexpr std::uint64_t kMinHorizon = 10'000;
inline constexpr int kBatchCount = 20;
inline constexpr double kWarmupFraction = 0.1;

/// Poisson(lambda) arrivals to n servers with mean service time 1/mu and no
/// waiting room. The first 10% of arrivals are discarded; the rest are cut
/// into 20 equal batches. Same seed, same estimate.
SimEstimate simulate_loss(int servers, double arrival_rate, double service_rate,
                          std::uint64_t horizon_arrivals, std::uint64_t seed,
                          ServiceLaw law = ServiceLaw::Exponential);

struct BlockReport {
  CoalitionSet block;
  double rate = 0.0;      // arrival rate fed to the block
  double analytic = 0.0;  // common blocking probability B*
  SimEstimate estimate;
  bool covered = false;
};

/// Simulates every block of `p` at its equilibrium rate as an independent
/// loss system and checks the common blocking probability against each
/// block's interval.
std::vector<BlockReport> validate_we(const SystemSpec& spec, const Partition& p,
                                     std::uint64_t horizon, std::uint64_t seed);

/// As validate_we with caller-chosen block rates, still compared against the
/// equilibrium B*. Used to confirm the check can fail.
std::vector<BlockReport> validate_rates(const SystemSpec& spec, const Partition& p,
                                        const std::vector<double>& rates,
                                        std::uint64_t horizon, std::uint64_t seed);

}  // namespace lossgame
