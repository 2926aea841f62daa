#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "support.hpp"

using namespace lossgame;

TEST_CASE("system spec sorts agents and remembers caller labels") {
  const SystemSpec s({3, 9, 5}, 15.0, 1.0);
  CHECK(s.server_counts() == std::vector<int>{9, 5, 3});
  CHECK(s.original_index(0) == 1);
  CHECK(s.original_index(1) == 2);
  CHECK(s.original_index(2) == 0);
  CHECK(s.canonical_index(0) == 2);
  CHECK(s.user_server_counts() == std::vector<int>{3, 9, 5});
  CHECK(s.total_servers() == 17);
  CHECK(s.offered_load() == doctest::Approx(15.0));
  CHECK(s.with_total_rate(2.0).total_rate() == 2.0);
  CHECK(s.with_total_rate(2.0).user_server_counts() == s.user_server_counts());
}

TEST_CASE("ties keep caller order") {
  const SystemSpec s({4, 7, 4}, 1.0, 1.0);
  CHECK(s.original_index(1) == 0);
  CHECK(s.original_index(2) == 2);
}

TEST_CASE("system spec rejects invalid input") {
  CHECK_THROWS_AS(SystemSpec({}, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(SystemSpec({3, 0}, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(SystemSpec({3}, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(SystemSpec({3}, 1.0, -1.0), DomainError);
  CHECK_THROWS_AS(SystemSpec({3}, std::nan(""), 1.0), DomainError);
  CHECK_THROWS_AS(SystemSpec(std::vector<int>(33, 1), 1.0, 1.0), DomainError);
}

TEST_CASE("spec equality and memo key") {
  CHECK(SystemSpec({9, 7}, 15.0, 1.0) == SystemSpec({9, 7}, 15.0, 1.0));
  CHECK_FALSE(SystemSpec({9, 7}, 15.0, 1.0) == SystemSpec({7, 9}, 15.0, 1.0));
  CHECK(SystemSpec({9, 7}, 15.0, 1.0).key() == SystemSpec({7, 9}, 15.0, 1.0).key());
  CHECK(SystemSpec({9, 7}, 15.0, 1.0).key() != SystemSpec({9, 7}, std::nextafter(15.0, 16.0), 1.0).key());
}

TEST_CASE("coalition set algebra") {
  const CoalitionSet a{0, 2};
  const CoalitionSet b{2, 3};
  CHECK((a | b) == CoalitionSet{0, 2, 3});
  CHECK((a & b) == CoalitionSet{2});
  CHECK((a - b) == CoalitionSet{0});
  CHECK(a.size() == 2);
  CHECK(a.lowest() == 0);
  CHECK(CoalitionSet().lowest() == -1);
  CHECK(CoalitionSet{2}.proper_subset_of(a));
  CHECK_FALSE(a.proper_subset_of(a));
  CHECK(a.intersects(b));
  CHECK(a.members() == std::vector<int>{0, 2});
  CHECK(CoalitionSet::all(5).mask() == 31U);
  CHECK(to_string(a) == "{0,2}");
  const SystemSpec s({9, 7, 6}, 1.0, 1.0);
  CHECK(server_count(s, a) == 15);
}

TEST_CASE("validate_partition examples") {
  const SystemSpec s({3, 2, 1}, 1.0, 1.0);
  CHECK_NOTHROW(validate_partition(s, {CoalitionSet{0, 1}, CoalitionSet{2}}));
  CHECK_THROWS_AS(validate_partition(s, {CoalitionSet{0, 1}, CoalitionSet{1, 2}}), OverlapError);
  CHECK_THROWS_AS(validate_partition(s, {CoalitionSet{0}, CoalitionSet{1}}), CoverageError);
  CHECK_THROWS_AS(validate_partition(s, {CoalitionSet{0, 1, 2}, CoalitionSet{}}), DomainError);
  CHECK_THROWS_AS(validate_partition(s, {CoalitionSet{0, 1, 2, 3}}), DomainError);
  CHECK_THROWS_AS(validate_partition(s, Partition::grand(4)), CoverageError);
}

TEST_CASE("partitions are held in canonical order") {
  const Partition p(4, {CoalitionSet{3}, CoalitionSet{1, 2}, CoalitionSet{0}});
  CHECK(p[0] == CoalitionSet{0});
  CHECK(p[1] == CoalitionSet{1, 2});
  CHECK(p[2] == CoalitionSet{3});
  CHECK(p.rgs() == std::vector<int>{0, 1, 1, 2});
  CHECK(p.rgs_string() == "0112");
  CHECK(p.to_string() == "0|1,2|3");
  CHECK(Partition::from_rgs(p.rgs()) == p);
  CHECK(p.block_index_of(2) == 1);
  CHECK(p.find_block(CoalitionSet{1, 2}) == std::optional<std::size_t>{1});
  CHECK_FALSE(p.contains_block(CoalitionSet{1}));
  CHECK_THROWS_AS(Partition::from_rgs({0, 2}), DomainError);
}

TEST_CASE("canonicalize is idempotent") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Partition p = random_partition(7, rng);
    std::vector<CoalitionSet> shuffled = p.blocks();
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto once = canonicalize(shuffled);
    CHECK(canonicalize(once) == once);
    CHECK(once == p.blocks());
  }
}

TEST_CASE("reform covers mergers, splits and general moves") {
  const Partition p(5, {CoalitionSet{0, 1}, CoalitionSet{2, 3}, CoalitionSet{4}});
  CHECK(reform(p, CoalitionSet{0, 1, 4}) == Partition(5, {CoalitionSet{0, 1, 4}, CoalitionSet{2, 3}}));
  CHECK(reform(p, CoalitionSet{2}) ==
        Partition(5, {CoalitionSet{0, 1}, CoalitionSet{2}, CoalitionSet{3}, CoalitionSet{4}}));
  CHECK(reform(p, CoalitionSet{1, 2}) ==
        Partition(5, {CoalitionSet{0}, CoalitionSet{1, 2}, CoalitionSet{3}, CoalitionSet{4}}));
}

TEST_CASE("parse_partition") {
  CHECK(parse_partition(5, "0,1|2|3,4").to_string() == "0,1|2|3,4");
  CHECK(parse_partition(3, " 2 | 0,1 ").to_string() == "0,1|2");
  CHECK_THROWS_AS(parse_partition(3, "0,1|1"), OverlapError);
  CHECK_THROWS_AS(parse_partition(3, "0,1|1,2"), OverlapError);
  CHECK_THROWS_AS(parse_partition(3, "0,1"), CoverageError);
  CHECK_THROWS_AS(parse_partition(3, "0,x|1,2"), ParseError);
  CHECK_THROWS_AS(parse_partition(3, "0,1||2"), ParseError);
  CHECK_THROWS_AS(parse_partition(3, "0,1|2|"), ParseError);
  CHECK_THROWS_AS(parse_partition(3, "0,1|2,3"), DomainError);
}

TEST_CASE("user label round trips") {
  const SystemSpec s({3, 9, 5, 9}, 1.0, 1.0);  // canonical: 9(1) 9(3) 5(2) 3(0)
  const CoalitionSet user{0, 3};
  const CoalitionSet canon = from_user_labels(s, user);
  CHECK(canon == CoalitionSet{1, 3});
  CHECK(to_user_labels(s, canon) == user);
  const Partition up = parse_partition(4, "0,3|1,2");
  CHECK(to_user_labels(s, from_user_labels(s, up)) == up);
  PayoffVector phi{{1.0, 2.0, 3.0, 4.0}};
  CHECK(to_user_labels(s, phi) == std::vector<double>{4.0, 1.0, 3.0, 2.0});
}

TEST_CASE("payoff consistency") {
  const SystemSpec s({2, 1}, 1.0, 1.0);
  const Partition p = Partition::singletons(2);
  const WardropResult we = wardrop_split(s, p);
  CHECK_NOTHROW(check_payoff_consistency(s, p, we, PayoffVector{we.rates}));
  CHECK_THROWS_AS(check_payoff_consistency(s, p, we, PayoffVector{{we.rates[0] + 1e-6, we.rates[1]}}),
                  InconsistentPayoffError);
  CHECK_THROWS_AS(check_payoff_consistency(s, p, we, PayoffVector{{1.0}}), InconsistentPayoffError);
  const Partition g = Partition::grand(2);
  CHECK_THROWS_AS(check_payoff_consistency(s, g, wardrop_split(s, g), PayoffVector{{1.5, -0.5}}),
                  InconsistentPayoffError);
}

TEST_CASE("rule names") {
  CHECK(parse_rule("RB-IA") == StabilityRule::RbIa);
  CHECK(parse_rule("rb_pa") == StabilityRule::RbPa);
  CHECK(parse_rule("gb-pa") == StabilityRule::GbPa);
  CHECK_FALSE(parse_rule("rb").has_value());
  CHECK(to_string(StabilityRule::RbPa) == "rb-pa");
  CHECK(to_string(MoveKind::Split) == "split");
}

TEST_CASE("enumerate_partitions examples") {
  CHECK(enumerate_partitions(1).size() == 1);
  CHECK(enumerate_partitions(3).size() == 5);
  CHECK(enumerate_partitions(5).size() == 52);
  CHECK_THROWS_AS(PartitionEnumerator(13), SizeLimitError);
  CHECK_THROWS_AS(PartitionEnumerator(0), DomainError);
}

TEST_CASE("enumeration matches the Bell triangle and is duplicate-free") {
  const auto bell = testsupport::bell_numbers(8);
  for (int n = 1; n <= 8; ++n) {
    std::set<std::string> seen;
    std::string prev;
    for_each_partition(n, [&](const Partition& p) {
      const std::string key = p.rgs_string();
      CHECK(key > prev);  // restricted-growth strings come out ascending
      prev = key;
      seen.insert(key);
    });
    CHECK(seen.size() == bell[static_cast<std::size_t>(n)]);
  }
}

TEST_CASE("enumerate_partitions_containing examples") {
  CHECK(enumerate_partitions_containing(4, CoalitionSet{0, 1, 2, 3}).size() == 1);
  CHECK(enumerate_partitions_containing(4, CoalitionSet{0}).size() == 5);
  CHECK(enumerate_partitions_containing(5, CoalitionSet{0, 1}).size() == 5);
  CHECK_THROWS_AS(enumerate_partitions_containing(4, CoalitionSet{}), DomainError);
  CHECK_THROWS_AS(enumerate_partitions_containing(4, CoalitionSet{5}), DomainError);
}

TEST_CASE("partitions containing q number Bell(n - |q|) and all contain q") {
  const auto bell = testsupport::bell_numbers(8);
  for (int n = 1; n <= 8; ++n) {
    const auto full = CoalitionSet::all(n).mask();
    for (CoalitionSet::mask_type m = 1; m <= full; ++m) {
      const CoalitionSet q(m);
      const auto parts = enumerate_partitions_containing(n, q);
      REQUIRE(parts.size() == bell[static_cast<std::size_t>(n - q.size())]);
      for (const Partition& p : parts) CHECK(p.contains_block(q));
    }
  }
}
