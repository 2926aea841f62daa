#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "support.hpp"

using namespace lossgame;

namespace {

const SystemSpec kFive({9, 7, 6, 5, 3}, 15.0, 1.0);

// Random systems with 2..5 agents and at most 30 servers that have some
// subset sum strictly between N/2 and N.
std::vector<std::vector<int>> random_systems(int count) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> nd(2, 5);
  std::vector<std::vector<int>> out;
  while (static_cast<int>(out.size()) < count) {
    auto counts = testsupport::random_counts(rng, nd(rng), 10);
    if (std::accumulate(counts.begin(), counts.end(), 0) > 30) continue;
    if (k_star(SystemSpec(counts, 1.0, 1.0)).achievable_ks.empty()) continue;
    out.push_back(std::move(counts));
  }
  return out;
}

}  // namespace

TEST_CASE("first-order split") {
  CHECK(first_order_we(15, 30, 300.0) == 150.0);
  CHECK(first_order_we(27, 30, 300.0) == 270.0);
  for (int k = 1; k < 30; ++k) CHECK(first_order_we(k, 30, 12.0) / k == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(first_order_we(0, 30, 1.0), DomainError);
  CHECK_THROWS_AS(first_order_we(30, 30, 1.0), DomainError);
}

TEST_CASE("second-order split at the midpoint is exact") {
  for (double rate : {1.0, 30.0, 300.0}) {
    const ApproxWE a = second_order_we(15.0, 30, rate);
    CHECK(a.lambda_hat == doctest::Approx(rate / 2).epsilon(1e-12));
    CHECK(a.order == ApproxOrder::Second);
  }
}

TEST_CASE("second-order split solves its balance equation") {
  for (double rate : {3.0, 30.0, 300.0}) {
    for (double k = 1.0; k <= 29.0; k += 0.5) {
      const ApproxWE a = second_order_we(k, 30, rate);
      CHECK(a.lambda_hat > 0.0);
      CHECK(a.lambda_hat < rate);
      CHECK(a.residual <= 1e-10 * std::max(1.0, rate));
      CHECK(a.iterations >= 1);
      const double x = a.lambda_hat;
      const double y = rate - x;
      const double lhs = x / k;
      const double rhs = y / (30.0 - k) * (1.0 + (k - 1.0) / x) / (1.0 + (29.0 - k) / y);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
  }
}

TEST_CASE("second-order split scales with the service rate") {
  const ApproxWE a = second_order_we(20.0, 30, 90.0);
  const ApproxWE b = second_order_we(20.0, 30, 270.0, 3.0);
  CHECK(b.lambda_hat == doctest::Approx(a.lambda_hat * 3.0).epsilon(1e-10));
}

TEST_CASE("second-order split domain") {
  CHECK_THROWS_AS(second_order_we(0.5, 30, 10.0), DomainError);
  CHECK_THROWS_AS(second_order_we(29.5, 30, 10.0), DomainError);
  CHECK_THROWS_AS(second_order_we(10.0, 30, 0.0), DomainError);
  CHECK_THROWS_AS(second_order_we(10.0, 30, 10.0, -1.0), DomainError);
}

TEST_CASE("second-order per-server rate increases with k in heavy traffic") {
  double prev = 0.0;
  for (double k = 15.25; k < 30.0 - 1.0 + 1e-9; k += 0.25) {
    const double v = second_order_we(k, 30, 300.0).lambda_hat / k;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("second-order split tracks the exact split as traffic grows") {
  std::vector<double> gaps30;
  std::vector<double> gaps100;
  std::vector<double> gaps300;
  for (int k = 16; k <= 29; ++k) {
    for (double rate : {30.0, 100.0, 300.0}) {
      const SystemSpec s = kFive.with_total_rate(rate);
      const double gap = std::abs(second_order_we(k, 30, rate).lambda_hat - psi(s, k).lambda_k) / rate;
      (rate == 30.0 ? gaps30 : rate == 100.0 ? gaps100 : gaps300).push_back(gap);
    }
  }
  for (std::size_t i = 0; i < gaps300.size(); ++i) {
    CHECK(gaps300[i] < 0.01);
    CHECK(gaps100[i] < gaps30[i]);
    CHECK(gaps300[i] < gaps100[i]);
  }
}

TEST_CASE("closed-form k* values") {
  CHECK(heavy_k_star(kFive) == 27);
  CHECK(heavy_k_star(SystemSpec({10, 7, 6, 5, 4}, 1.0, 1.0)) == 28);
  CHECK(heavy_k_star(SystemSpec({5, 5}, 1.0, 1.0)) == 5);
  CHECK_THROWS_AS(heavy_k_star(SystemSpec({5}, 1.0, 1.0)), DomainError);
  CHECK(light_k_star(kFive) == 16);
  CHECK(light_k_star(SystemSpec({10, 7, 6, 5, 4}, 1.0, 1.0)) == 17);
  CHECK_THROWS_AS(light_k_star(SystemSpec({5, 5}, 1.0, 1.0)), NoFeasibleKError);
  CHECK_THROWS_AS(light_k_star(SystemSpec({5}, 1.0, 1.0)), NoFeasibleKError);
}

TEST_CASE("heavy-traffic formula matches the exact k* at 10N") {
  for (const auto& counts : random_systems(10)) {
    const SystemSpec s(counts, 1.0, 1.0);
    const int n_total = s.total_servers();
    const KStarResult r = k_star(s.with_total_rate(10.0 * n_total));
    CHECK(r.maximizers == std::vector<int>{heavy_k_star(s)});
  }
}

TEST_CASE("light-traffic formula matches the exact k* deep in light traffic") {
  // At 0.01N the exact maximizer generally sits above the formula; the two
  // agree only far lower.
  for (const auto& counts : random_systems(10)) {
    const SystemSpec s(counts, 1.0, 1.0);
    const KStarResult r = k_star(s.with_total_rate(1e-30 * s.total_servers()));
    CHECK(r.maximizers == std::vector<int>{light_k_star(s)});
  }
}

TEST_CASE("regime table on the five-agent system") {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.3 * std::pow(1000.0, i / 19.0));
  const RegimeTable t = regime_crosscheck(kFive, grid);
  REQUIRE(t.rows.size() == 20);
  CHECK(t.rows.front().k_star.maximizers == std::vector<int>{19});
  CHECK(t.rows.back().k_star.maximizers == std::vector<int>{27});
  CHECK(t.rows.back().matches_heavy);
  CHECK_FALSE(t.rows.front().matches_light);
  REQUIRE(t.heavy_crossover.has_value());
  CHECK(*t.heavy_crossover <= 300.0);
  CHECK_FALSE(t.light_crossover.has_value());
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(t.rows[i].k_star.representative() >= t.rows[i - 1].k_star.representative());
    CHECK(t.rows[i].grand_blocking > t.rows[i - 1].grand_blocking);
    CHECK(t.rows[i].total_rate == grid[i]);
  }

  const RegimeTable deep = regime_crosscheck(kFive, {1e-12, 1e-10, 300.0});
  CHECK(deep.rows[0].matches_light);
  CHECK(deep.rows[1].matches_light);
  REQUIRE(deep.light_crossover.has_value());
  CHECK(*deep.light_crossover == 1e-10);

  CHECK_THROWS_AS(regime_crosscheck(kFive, {3.0, 1.0}), DomainError);
}
