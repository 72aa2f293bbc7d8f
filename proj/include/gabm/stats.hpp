#pragma once

#include <span>
#include <string>
#include <vector>

namespace gabm {

enum class OutcomeVariable { tip_change, joint, diff };
const char* to_string(OutcomeVariable v);
OutcomeVariable outcome_variable_from_string(const std::string& s);

struct Moments {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample SD, n-1 denominator
};

// n >= 2 required.
Moments describe(std::span<const double> values);

// Per-group per-variable summary; the input to every summary-level test.
struct GroupSummary {
  std::string group_id;
  OutcomeVariable variable = OutcomeVariable::tip_change;
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

enum class LeveneCenter { mean, median };

struct LeveneResult {
  double w_stat = 0.0;
  int df1 = 0;
  int df2 = 0;
  double p_value = 1.0;
  LeveneCenter center = LeveneCenter::mean;
};

// One-way ANOVA on absolute deviations from the group center. Groups of
// constant values give W = 0, p = 1.
LeveneResult levene(const std::vector<std::vector<double>>& groups,
                    LeveneCenter center = LeveneCenter::mean);

struct WelchResult {
  double f_stat = 0.0;
  int df1 = 0;
  double df2 = 0.0;
  double p_value = 1.0;
  double partial_eta_sq = 0.0;
};

// Welch's heteroscedastic one-way ANOVA from summaries, with the classic
// SSb/(SSb+SSw) partial eta squared.
WelchResult welch_anova(std::span<const GroupSummary> summaries);

struct PairwiseResult {
  std::string group_a;
  std::string group_b;
  double mean_diff = 0.0;  // mean_a - mean_b
  double se = 0.0;
  double q_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Games-Howell comparisons over every pair, with the studentized range
// reference at k = number of groups and per-pair Welch df.
std::vector<PairwiseResult> games_howell(std::span<const GroupSummary> summaries);

enum class TostSeMode { welch, pooled };

struct TostResult {
  std::string group_id;
  OutcomeVariable variable = OutcomeVariable::tip_change;
  double lower_bound = 0.0;  // -delta
  double upper_bound = 0.0;  // +delta
  double t_lower = 0.0;
  double t_upper = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // max of the two one-sided p values
  bool is_equivalent = false;
  double alpha = 0.05;
  TostSeMode se_mode = TostSeMode::welch;
};

// Two one-sided tests of |mean_ai - mean_human| < delta, where delta is
// margin_factor times the two-group pooled SD. The t statistics use the
// Welch (unpooled) SE and df by default; pooled mode is available.
TostResult tost_equivalence(const GroupSummary& ai, const GroupSummary& human,
                            double margin_factor, double alpha,
                            TostSeMode se_mode = TostSeMode::welch);

}  // namespace gabm
