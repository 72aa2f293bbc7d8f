#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <unordered_set>

#include "gabm/design.hpp"
#include "gabm/rand.hpp"

using namespace gabm;

TEST_CASE("enumerate_conditions gives the 16 cells in canonical order") {
  auto all = enumerate_conditions();
  REQUIRE(all.size() == 16);
  CHECK(all[0] == ExperimentCondition{ServiceOutcome::fails, false, TipVisibility::after});

  std::set<std::string> keys;
  std::map<ServiceOutcome, int> per_outcome;
  for (size_t i = 0; i < all.size(); ++i) {
    keys.insert(all[i].key());
    per_outcome[all[i].service_outcome]++;
    CHECK(all[i].canonical_index() == static_cast<int>(i));
  }
  CHECK(keys.size() == 16);
  for (auto& [outcome, n] : per_outcome) CHECK(n == 4);

  ExperimentCondition wanted{ServiceOutcome::exceeds, true, TipVisibility::before};
  CHECK(std::count(all.begin(), all.end(), wanted) == 1);
}

TEST_CASE("condition keys round trip") {
  for (const auto& c : enumerate_conditions()) {
    CHECK(ExperimentCondition::from_key(c.key()) == c);
  }
  CHECK(ExperimentCondition{ServiceOutcome::meets, true, TipVisibility::before}.key() ==
        "meets/adjustable/before");
  CHECK_THROWS(ExperimentCondition::from_key("meets/sometimes/before"));
  CHECK_THROWS(ExperimentCondition::from_key("nonsense"));
}

TEST_CASE("required_replications") {
  CHECK(required_replications({2.79, 1.0, 1.96}) == 30);
  CHECK(required_replications({0.0, 1.0, 1.96}) == 2);
  CHECK(required_replications({5.0, 1.0, 1.96}) == 97);
  CHECK_THROWS_AS(required_replications({1.0, 0.0, 1.96}), std::invalid_argument);
  CHECK_THROWS_AS(required_replications({1.0, -1.0, 1.96}), std::invalid_argument);

  // Monotone nondecreasing in pilot_sd, nonincreasing in half_width.
  int prev = 0;
  for (double s = 0.0; s <= 6.0; s += 0.13) {
    int n = required_replications({s, 1.0, 1.96});
    CHECK(n >= prev);
    prev = n;
  }
  prev = 1 << 30;
  for (double h = 0.2; h <= 3.0; h += 0.07) {
    int n = required_replications({2.79, h, 1.96});
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("build_plan structure and determinism") {
  auto plan = build_plan(30, 42);
  CHECK(plan.entries.size() == 480);
  CHECK(build_plan(1, 0).entries.size() == 16);

  auto again = build_plan(30, 42);
  CHECK(plan.to_json() == again.to_json());

  // Per-condition replicate indices are exactly 1..n.
  std::map<std::string, std::set<int>> reps;
  for (const auto& e : plan.entries) reps[e.condition.key()].insert(e.replicate);
  CHECK(reps.size() == 16);
  for (auto& [key, set] : reps) {
    CHECK(set.size() == 30);
    CHECK(*set.begin() == 1);
    CHECK(*set.rbegin() == 30);
  }

  // (condition, replicate) pairs unique, seeds distinct.
  std::set<std::pair<std::string, int>> pairs;
  std::set<uint64_t> seeds;
  for (const auto& e : plan.entries) {
    pairs.insert({e.condition.key(), e.replicate});
    seeds.insert(e.seed);
  }
  CHECK(pairs.size() == 480);
  CHECK(seeds.size() == 480);

  CHECK_THROWS_AS(build_plan(0, 1), std::invalid_argument);
}

TEST_CASE("plan JSON round trip") {
  auto plan = build_plan(3, 777);
  auto back = ReplicationPlan::from_json(plan.to_json());
  CHECK(back.master_seed == plan.master_seed);
  CHECK(back.replications_per_cell == plan.replications_per_cell);
  REQUIRE(back.entries.size() == plan.entries.size());
  for (size_t i = 0; i < plan.entries.size(); ++i) {
    CHECK(back.entries[i].condition == plan.entries[i].condition);
    CHECK(back.entries[i].replicate == plan.entries[i].replicate);
    CHECK(back.entries[i].seed == plan.entries[i].seed);
  }
}

TEST_CASE("derived seeds behave like 64-bit hashes: no collisions at 1e6") {
  // 10^6 derived seeds across master seeds, keys and indices.
  std::unordered_set<uint64_t> seen;
  seen.reserve(1 << 21);
  auto conditions = enumerate_conditions();
  uint64_t count = 0;
  for (uint64_t master = 0; master < 25; ++master) {
    for (const auto& c : conditions) {
      const std::string key = c.key();
      for (uint64_t i = 1; i <= 2500; ++i) {
        seen.insert(derive_seed(master, key, i));
        ++count;
      }
    }
  }
  CHECK(count == 1'000'000);
  CHECK(seen.size() == count);
}
