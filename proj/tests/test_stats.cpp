#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gabm/errors.hpp"
#include "gabm/rand.hpp"
#include "gabm/stats.hpp"
#include "fixtures.hpp"

using namespace gabm;

TEST_CASE("describe") {
  std::vector<double> v = {1.0, 2.0, 3.0};
  auto m = describe(v);
  CHECK(m.n == 3);
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.sd == doctest::Approx(1.0));

  std::vector<double> constant(10, 2.5);
  CHECK(describe(constant).sd == 0.0);

  std::vector<double> one = {1.0};
  CHECK_THROWS_AS(describe(one), std::invalid_argument);
}

TEST_CASE("describe recovers generator moments") {
  // Calibrated generator stands in for raw baseline data: the sample mean
  // and SD must land within 3 standard errors of the generator's.
  Rng rng(99123);
  const double mu = -0.08, sd = 3.61;
  std::vector<double> v(477);
  for (auto& x : v) x = rng.normal(mu, sd);
  auto m = describe(v);
  double se_mean = sd / std::sqrt(477.0);
  double se_sd = sd / std::sqrt(2.0 * 476.0);
  CHECK(std::fabs(m.mean - mu) < 3 * se_mean);
  CHECK(std::fabs(m.sd - sd) < 3 * se_sd);
}

TEST_CASE("levene degenerate and error cases") {
  std::vector<std::vector<double>> constant = {{2, 2, 2}, {2, 2, 2}};
  auto r = levene(constant);
  CHECK(r.w_stat == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK(r.df1 == 1);
  CHECK(r.df2 == 4);

  CHECK_THROWS_AS(levene({{1, 2, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(levene({{1, 2, 3}, {1}}), std::invalid_argument);
}

TEST_CASE("levene type-I calibration: p uniform under equal variances") {
  Rng rng(531);
  std::vector<double> ps;
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<std::vector<double>> groups(3, std::vector<double>(60));
    for (auto& g : groups)
      for (auto& x : g) x = rng.normal();
    ps.push_back(levene(groups).p_value);
  }
  CHECK(fixtures::ks_uniform_p(ps) > 0.01);
}

TEST_CASE("levene power: detects a 3x SD ratio at n=480") {
  Rng rng(777);
  std::vector<std::vector<double>> groups(2, std::vector<double>(480));
  for (auto& x : groups[0]) x = rng.normal(0.0, 1.0);
  for (auto& x : groups[1]) x = rng.normal(0.0, 3.0);
  CHECK(levene(groups).p_value < 0.001);
  CHECK(levene(groups, LeveneCenter::median).p_value < 0.001);
}

TEST_CASE("welch anova reproduces reference effect sizes") {
  auto all = fixtures::reference_summaries();

  auto tip = welch_anova(fixtures::summaries_for(all, OutcomeVariable::tip_change));
  CHECK(tip.df1 == 6);
  CHECK(std::fabs(tip.partial_eta_sq - 0.009) < 0.001);
  CHECK(tip.p_value < 0.01);

  auto diff = welch_anova(fixtures::summaries_for(all, OutcomeVariable::diff));
  CHECK(std::fabs(diff.partial_eta_sq - 0.051) < 0.002);
  CHECK(std::fabs(diff.f_stat - 33.1) / 33.1 < 0.05);
  CHECK(diff.p_value < 0.001);

  auto joint = welch_anova(fixtures::summaries_for(all, OutcomeVariable::joint));
  CHECK(std::fabs(joint.partial_eta_sq - 0.003) < 0.002);
  CHECK(joint.p_value > 0.05);
}

TEST_CASE("welch anova trivial and error cases") {
  GroupSummary a{"a", OutcomeVariable::joint, 100, 1.5, 2.0};
  GroupSummary b = a;
  b.group_id = "b";
  GroupSummary c = a;
  c.group_id = "c";
  auto r = welch_anova(std::vector<GroupSummary>{a, b, c});
  CHECK(r.f_stat == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0));
  CHECK(r.partial_eta_sq == doctest::Approx(0.0));

  GroupSummary degenerate{"d", OutcomeVariable::joint, 100, 1.5, 0.0};
  CHECK_THROWS_AS(welch_anova(std::vector<GroupSummary>{a, degenerate}), DataError);

  GroupSummary mixed{"m", OutcomeVariable::diff, 100, 1.5, 2.0};
  CHECK_THROWS_AS(welch_anova(std::vector<GroupSummary>{a, mixed}),
                  std::invalid_argument);
}

TEST_CASE("welch anova with k=2 equals the squared Welch t") {
  GroupSummary a{"a", OutcomeVariable::tip_change, 480, 0.15, 3.42};
  GroupSummary h{"h", OutcomeVariable::tip_change, 477, -0.08, 3.61};
  auto r = welch_anova(std::vector<GroupSummary>{a, h});

  double se2 = a.sd * a.sd / a.n + h.sd * h.sd / h.n;
  double t = (a.mean - h.mean) / std::sqrt(se2);
  CHECK(r.f_stat == doctest::Approx(t * t).epsilon(1e-9));

  double df = se2 * se2 / (std::pow(a.sd * a.sd / a.n, 2) / (a.n - 1) +
                           std::pow(h.sd * h.sd / h.n, 2) / (h.n - 1));
  CHECK(r.df2 == doctest::Approx(df).epsilon(1e-9));
}

TEST_CASE("games-howell reproduces reference pairs") {
  auto all = fixtures::reference_summaries();
  auto tip_groups = fixtures::summaries_for(all, OutcomeVariable::tip_change);
  std::sort(tip_groups.begin(), tip_groups.end(),
            [](const auto& a, const auto& b) { return a.group_id < b.group_id; });
  auto tip = games_howell(tip_groups);
  CHECK(tip.size() == 21);

  bool found = false;
  for (const auto& r : tip) {
    if (r.group_a == "gpt-4.1" && r.group_b == "gpt-4o") {
      found = true;
      CHECK(std::fabs(r.mean_diff - (-1.02)) < 0.01);
      CHECK(std::fabs(r.p_value - 0.008) < 0.004);
    }
  }
  CHECK(found);

  auto diff = games_howell(fixtures::summaries_for(all, OutcomeVariable::diff));
  for (const auto& r : diff) {
    if (r.group_a == "human" && r.group_b == "mistral-medium-3") {
      CHECK(r.p_value < 0.001);
    }
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
  }
}

TEST_CASE("games-howell identical groups and symmetry") {
  GroupSummary a{"a", OutcomeVariable::joint, 200, 0.5, 1.5};
  GroupSummary b = a;
  b.group_id = "b";
  auto same = games_howell(std::vector<GroupSummary>{a, b});
  REQUIRE(same.size() == 1);
  CHECK(same[0].p_value == doctest::Approx(1.0).epsilon(1e-6));

  GroupSummary c{"c", OutcomeVariable::joint, 150, 1.1, 2.2};
  auto fwd = games_howell(std::vector<GroupSummary>{a, c});
  auto rev = games_howell(std::vector<GroupSummary>{c, a});
  CHECK(fwd[0].mean_diff == doctest::Approx(-rev[0].mean_diff));
  CHECK(fwd[0].p_value == doctest::Approx(rev[0].p_value).epsilon(1e-12));
}

TEST_CASE("tost reproduces reference equivalence cells") {
  auto all = fixtures::reference_summaries();
  const auto& human_tip =
      fixtures::find_summary(all, "human", OutcomeVariable::tip_change);
  const auto& gpt4o_tip =
      fixtures::find_summary(all, "gpt-4o", OutcomeVariable::tip_change);

  auto r = tost_equivalence(gpt4o_tip, human_tip, 0.2, 0.05);
  CHECK(std::fabs(r.upper_bound - 0.7032) < 0.002);
  CHECK(r.lower_bound == doctest::Approx(-r.upper_bound));
  CHECK(std::fabs(r.p_value - 0.0185) < 0.005);
  CHECK(r.is_equivalent);

  const auto& human_diff = fixtures::find_summary(all, "human", OutcomeVariable::diff);
  const auto& ml2_diff =
      fixtures::find_summary(all, "mistral-large-2", OutcomeVariable::diff);
  auto far = tost_equivalence(ml2_diff, human_diff, 0.2, 0.05);
  CHECK(far.p_value > 0.99);
  CHECK_FALSE(far.is_equivalent);
}

TEST_CASE("tost trivial, pooled mode and error cases") {
  GroupSummary a{"a", OutcomeVariable::joint, 5000, 1.0, 2.0};
  GroupSummary h{"h", OutcomeVariable::joint, 5000, 1.0, 2.0};
  auto r = tost_equivalence(a, h, 0.2, 0.05);
  CHECK(r.p_value < 1e-10);
  CHECK(r.is_equivalent);

  auto pooled = tost_equivalence(a, h, 0.2, 0.05, TostSeMode::pooled);
  CHECK(pooled.se_mode == TostSeMode::pooled);
  CHECK(pooled.df == doctest::Approx(9998.0));
  CHECK(pooled.upper_bound == doctest::Approx(r.upper_bound));

  GroupSummary zero_a{"a", OutcomeVariable::joint, 50, 1.0, 0.0};
  GroupSummary zero_h{"h", OutcomeVariable::joint, 50, 1.0, 0.0};
  CHECK_THROWS_AS(tost_equivalence(zero_a, zero_h, 0.2, 0.05), DataError);

  GroupSummary mixed{"m", OutcomeVariable::diff, 50, 1.0, 1.0};
  CHECK_THROWS_AS(tost_equivalence(a, mixed, 0.2, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(tost_equivalence(a, h, 0.0, 0.05), std::invalid_argument);
}

TEST_CASE("tost booleans across the full reference grid") {
  auto all = fixtures::reference_summaries();
  struct Cell {
    const char* group;
    OutcomeVariable var;
    bool equivalent;
  };
  const Cell cells[] = {
      {"gpt-4o", OutcomeVariable::tip_change, true},
      {"gpt-4o", OutcomeVariable::joint, true},
      {"gpt-4o", OutcomeVariable::diff, true},
      {"gpt-4.1", OutcomeVariable::tip_change, false},
      {"gpt-4.1", OutcomeVariable::joint, true},
      {"gpt-4.1", OutcomeVariable::diff, false},
      {"sonnet-3.5", OutcomeVariable::tip_change, true},
      {"sonnet-3.5", OutcomeVariable::joint, false},
      {"sonnet-3.5", OutcomeVariable::diff, true},
      {"sonnet-4", OutcomeVariable::tip_change, false},
      {"sonnet-4", OutcomeVariable::joint, true},
      {"sonnet-4", OutcomeVariable::diff, false},
      {"mistral-large-2", OutcomeVariable::tip_change, true},
      {"mistral-large-2", OutcomeVariable::joint, true},
      {"mistral-large-2", OutcomeVariable::diff, false},
      {"mistral-medium-3", OutcomeVariable::tip_change, false},
      {"mistral-medium-3", OutcomeVariable::joint, true},
      {"mistral-medium-3", OutcomeVariable::diff, false},
  };
  for (const auto& cell : cells) {
    const auto& ai = fixtures::find_summary(all, cell.group, cell.var);
    const auto& human = fixtures::find_summary(all, "human", cell.var);
    auto r = tost_equivalence(ai, human, 0.2, 0.05);
    INFO(cell.group, " ", to_string(cell.var));
    CHECK(r.is_equivalent == cell.equivalent);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    CHECK(r.is_equivalent == (r.p_value < r.alpha));
  }
}
