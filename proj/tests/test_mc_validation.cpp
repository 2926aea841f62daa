#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace lossgame;

// Single runs are checked at four half-widths (a miss there is ~1e-4 likely);
// coverage at the nominal 95% level is checked over many seeds instead.

TEST_CASE("one and two servers at unit load") {
  const SimEstimate one = simulate_loss(1, 1.0, 1.0, 1'000'000, 11);
  CHECK(std::abs(one.blocked_fraction - 0.5) <= 4 * one.half_width_95);
  CHECK(one.half_width_95 > 0.0);
  CHECK(one.half_width_95 < 0.01);
  CHECK(one.arrivals_observed == 900'000);

  const SimEstimate two = simulate_loss(2, 1.0, 1.0, 1'000'000, 12);
  CHECK(std::abs(two.blocked_fraction - erlang_b(2, 1.0)) <= 4 * two.half_width_95);
}

TEST_CASE("same seed, same estimate") {
  const SimEstimate a = simulate_loss(3, 2.0, 1.0, 50'000, 99);
  const SimEstimate b = simulate_loss(3, 2.0, 1.0, 50'000, 99);
  const SimEstimate c = simulate_loss(3, 2.0, 1.0, 50'000, 100);
  CHECK(a.blocked_fraction == b.blocked_fraction);
  CHECK(a.half_width_95 == b.half_width_95);
  CHECK(a.blocked_fraction != c.blocked_fraction);
}

TEST_CASE("interval coverage over 100 seeds") {
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    if (simulate_loss(2, 1.0, 1.0, 100'000, seed).covers(0.2)) ++covered;
  }
  CHECK(covered >= 90);
}

TEST_CASE("estimates are unbiased across seeds") {
  double sum = 0.0;
  const int runs = 100;
  for (int seed = 0; seed < runs; ++seed) {
    sum += simulate_loss(5, 3.0, 1.0, 20'000, 1000 + static_cast<std::uint64_t>(seed)).blocked_fraction;
  }
  // Spread of the mean of 100 runs is about 5e-4.
  CHECK(std::abs(sum / runs - erlang_b(5, 3.0)) < 3e-3);
}

TEST_CASE("deterministic service gives the same blocking") {
  for (int n : {1, 3, 8}) {
    const double lam = 0.8 * n;
    const SimEstimate ex = simulate_loss(n, lam, 1.0, 400'000, 5);
    const SimEstimate det = simulate_loss(n, lam, 1.0, 400'000, 6, ServiceLaw::Deterministic);
    CHECK(std::abs(ex.blocked_fraction - det.blocked_fraction) <
          3 * std::max(ex.half_width_95, det.half_width_95));
    CHECK(std::abs(det.blocked_fraction - erlang_b(n, lam)) <= 4 * det.half_width_95);
  }
}

TEST_CASE("simulation input checks") {
  CHECK_THROWS_AS(simulate_loss(0, 1.0, 1.0, 20'000, 1), DomainError);
  CHECK_THROWS_AS(simulate_loss(2, 0.0, 1.0, 20'000, 1), DomainError);
  CHECK_THROWS_AS(simulate_loss(2, 1.0, 0.0, 20'000, 1), DomainError);
  CHECK_THROWS_AS(simulate_loss(2, 1.0, 1.0, kMinHorizon - 1, 1), DomainError);
  CHECK_NOTHROW(simulate_loss(2, 1.0, 1.0, kMinHorizon, 1));
}

TEST_CASE("equilibrium blocks share one blocking probability") {
  const SystemSpec s({9, 7, 6, 5, 3}, 15.0, 1.0);
  const Partition p = Partition::singletons(5);
  const WardropResult we = wardrop_split(s, p);
  const auto report = validate_we(s, p, 1'000'000, 3);
  REQUIRE(report.size() == 5);
  for (std::size_t b = 0; b < report.size(); ++b) {
    CHECK(report[b].block == p[b]);
    CHECK(report[b].rate == we.rates[b]);
    CHECK(report[b].analytic == we.common_blocking);
    CHECK(report[b].covered == report[b].estimate.covers(we.common_blocking));
    CHECK(std::abs(report[b].estimate.blocked_fraction - we.common_blocking) <=
          4 * report[b].estimate.half_width_95);
  }
  // Replay.
  const auto again = validate_we(s, p, 1'000'000, 3);
  for (std::size_t b = 0; b < report.size(); ++b) {
    CHECK(again[b].estimate.blocked_fraction == report[b].estimate.blocked_fraction);
  }
}

TEST_CASE("block coverage rate over seeds") {
  const SystemSpec s({9, 7, 6, 5, 3}, 15.0, 1.0);
  const Partition p(5, {CoalitionSet{0, 4}, CoalitionSet{1, 2, 3}});
  int covered = 0;
  int total = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    for (const BlockReport& r : validate_we(s, p, 100'000, seed)) {
      ++total;
      covered += r.covered ? 1 : 0;
    }
  }
  CHECK(covered >= static_cast<int>(0.88 * total));
}

TEST_CASE("grand coalition reproduces Erlang-B") {
  const SystemSpec s({9, 7, 6, 5, 3}, 25.0, 1.0);
  const auto report = validate_we(s, Partition::grand(5), 1'000'000, 8);
  REQUIRE(report.size() == 1);
  CHECK(report[0].analytic == doctest::Approx(erlang_b(30, 25.0)).epsilon(1e-13));
  CHECK(std::abs(report[0].estimate.blocked_fraction - erlang_b(30, 25.0)) <=
        4 * report[0].estimate.half_width_95);
}

TEST_CASE("ten percent more traffic on one block is detected") {
  const SystemSpec s({9, 7, 6, 5, 3}, 15.0, 1.0);
  const Partition p = Partition::singletons(5);
  std::vector<double> rates = wardrop_split(s, p).rates;
  rates[1] *= 1.1;
  const auto report = validate_rates(s, p, rates, 1'000'000, 3);
  CHECK_FALSE(report[1].covered);
  CHECK(report[1].estimate.blocked_fraction > report[1].analytic);
  CHECK_THROWS_AS(validate_rates(s, p, {1.0, 2.0}, 1'000'000, 3), DomainError);
}
