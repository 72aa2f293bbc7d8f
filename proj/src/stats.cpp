#include "gabm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gabm/distributions.hpp"
#include "gabm/errors.hpp"

namespace gabm {

const char* to_string(OutcomeVariable v) {
  switch (v) {
    case OutcomeVariable::tip_change: return "tip_change";
    case OutcomeVariable::joint: return "joint";
    case OutcomeVariable::diff: return "diff";
  }
  throw std::invalid_argument("bad OutcomeVariable");
}

OutcomeVariable outcome_variable_from_string(const std::string& s) {
  if (s == "tip_change") return OutcomeVariable::tip_change;
  if (s == "joint") return OutcomeVariable::joint;
  if (s == "diff") return OutcomeVariable::diff;
  throw SchemaError("unknown outcome variable: " + s);
}

Moments describe(std::span<const double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("describe: need at least 2 values");
  double sum = 0.0;
  for (double v : values) sum += v;
  double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {static_cast<int>(values.size()), mean,
          std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

LeveneResult levene(const std::vector<std::vector<double>>& groups,
                    LeveneCenter center) {
  if (groups.size() < 2)
    throw std::invalid_argument("levene: need at least 2 groups");
  const int k = static_cast<int>(groups.size());
  std::vector<std::vector<double>> z(groups.size());
  long total_n = 0;
  for (size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2)
      throw std::invalid_argument("levene: every group needs n >= 2");
    total_n += static_cast<long>(groups[g].size());
    double c;
    if (center == LeveneCenter::mean) {
      c = describe(groups[g]).mean;
    } else {
      std::vector<double> sorted = groups[g];
      std::sort(sorted.begin(), sorted.end());
      size_t n = sorted.size();
      c = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }
    z[g].reserve(groups[g].size());
    for (double v : groups[g]) z[g].push_back(std::fabs(v - c));
  }

  double grand = 0.0;
  std::vector<double> zbar(z.size());
  for (size_t g = 0; g < z.size(); ++g) {
    double s = 0.0;
    for (double v : z[g]) s += v;
    zbar[g] = s / static_cast<double>(z[g].size());
    grand += s;
  }
  grand /= static_cast<double>(total_n);

  double ssb = 0.0, ssw = 0.0;
  for (size_t g = 0; g < z.size(); ++g) {
    ssb += static_cast<double>(z[g].size()) * (zbar[g] - grand) * (zbar[g] - grand);
    for (double v : z[g]) ssw += (v - zbar[g]) * (v - zbar[g]);
  }

  LeveneResult result;
  result.center = center;
  result.df1 = k - 1;
  result.df2 = static_cast<int>(total_n) - k;
  if (ssw <= 0.0) {
    // All deviations identical within groups; no evidence either way.
    result.w_stat = 0.0;
    result.p_value = 1.0;
    return result;
  }
  result.w_stat = (static_cast<double>(result.df2) / result.df1) * ssb / ssw;
  result.p_value = 1.0 - dist::f_cdf(result.w_stat, result.df1, result.df2);
  return result;
}

namespace {

void check_summaries(std::span<const GroupSummary> summaries) {
  if (summaries.size() < 2)
    throw std::invalid_argument("need at least 2 group summaries");
  for (const auto& s : summaries) {
    if (s.variable != summaries.front().variable)
      throw std::invalid_argument("summaries mix outcome variables");
    if (s.n < 2) throw std::invalid_argument("summary with n < 2: " + s.group_id);
    if (s.n > 1 && s.sd == 0.0)
      throw DataError("degenerate variance (sd = 0) in group " + s.group_id);
    if (!(s.sd >= 0.0) || !std::isfinite(s.sd))
      throw std::invalid_argument("bad sd in group " + s.group_id);
  }
}

double welch_pair_df(double s1, int n1, double s2, int n2) {
  double a = s1 * s1 / n1, b = s2 * s2 / n2;
  return (a + b) * (a + b) / (a * a / (n1 - 1) + b * b / (n2 - 1));
}

}  // namespace

WelchResult welch_anova(std::span<const GroupSummary> summaries) {
  check_summaries(summaries);
  const int k = static_cast<int>(summaries.size());

  double w_sum = 0.0, wm_sum = 0.0;
  for (const auto& s : summaries) {
    double w = s.n / (s.sd * s.sd);
    w_sum += w;
    wm_sum += w * s.mean;
  }
  double grand_w = wm_sum / w_sum;

  double num = 0.0, h_sum = 0.0;
  for (const auto& s : summaries) {
    double w = s.n / (s.sd * s.sd);
    num += w * (s.mean - grand_w) * (s.mean - grand_w);
    double frac = 1.0 - w / w_sum;
    h_sum += frac * frac / (s.n - 1);
  }
  num /= (k - 1);
  double denom = 1.0 + 2.0 * (k - 2) / (static_cast<double>(k) * k - 1.0) * h_sum;

  WelchResult result;
  result.df1 = k - 1;
  result.df2 = (static_cast<double>(k) * k - 1.0) / (3.0 * h_sum);
  result.f_stat = num / denom;
  result.p_value = 1.0 - dist::f_cdf(result.f_stat, result.df1, result.df2);

  // Effect size from the standard sums-of-squares decomposition.
  double n_total = 0.0, nm_sum = 0.0;
  for (const auto& s : summaries) {
    n_total += s.n;
    nm_sum += static_cast<double>(s.n) * s.mean;
  }
  double grand = nm_sum / n_total;
  double ssb = 0.0, ssw = 0.0;
  for (const auto& s : summaries) {
    ssb += s.n * (s.mean - grand) * (s.mean - grand);
    ssw += (s.n - 1) * s.sd * s.sd;
  }
  result.partial_eta_sq = (ssb + ssw) > 0.0 ? ssb / (ssb + ssw) : 0.0;
  return result;
}

std::vector<PairwiseResult> games_howell(std::span<const GroupSummary> summaries) {
  check_summaries(summaries);
  const int k = static_cast<int>(summaries.size());
  std::vector<PairwiseResult> out;
  out.reserve(static_cast<size_t>(k) * (k - 1) / 2);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const auto& a = summaries[i];
      const auto& b = summaries[j];
      PairwiseResult r;
      r.group_a = a.group_id;
      r.group_b = b.group_id;
      r.mean_diff = a.mean - b.mean;
      double se2 = a.sd * a.sd / a.n + b.sd * b.sd / b.n;
      r.se = std::sqrt(se2);
      r.q_stat = std::fabs(r.mean_diff) / std::sqrt(se2 / 2.0);
      r.df = welch_pair_df(a.sd, a.n, b.sd, b.n);
      r.p_value = 1.0 - dist::studentized_range_cdf(r.q_stat, k, r.df);
      out.push_back(r);
    }
  }
  return out;
}

TostResult tost_equivalence(const GroupSummary& ai, const GroupSummary& human,
                            double margin_factor, double alpha,
                            TostSeMode se_mode) {
  if (ai.variable != human.variable)
    throw std::invalid_argument("tost_equivalence: mixed outcome variables");
  if (!(margin_factor > 0.0))
    throw std::invalid_argument("tost_equivalence: margin_factor must be > 0");
  if (ai.n < 2 || human.n < 2)
    throw std::invalid_argument("tost_equivalence: need n >= 2 per group");

  double pooled_var = ((ai.n - 1) * ai.sd * ai.sd + (human.n - 1) * human.sd * human.sd) /
                      static_cast<double>(ai.n + human.n - 2);
  if (pooled_var <= 0.0)
    throw DataError("tost_equivalence: zero pooled SD gives a degenerate margin");
  double delta = margin_factor * std::sqrt(pooled_var);

  double se, df;
  if (se_mode == TostSeMode::welch) {
    se = std::sqrt(ai.sd * ai.sd / ai.n + human.sd * human.sd / human.n);
    df = welch_pair_df(ai.sd, ai.n, human.sd, human.n);
  } else {
    se = std::sqrt(pooled_var * (1.0 / ai.n + 1.0 / human.n));
    df = ai.n + human.n - 2;
  }

  TostResult r;
  r.group_id = ai.group_id;
  r.variable = ai.variable;
  r.lower_bound = -delta;
  r.upper_bound = delta;
  r.alpha = alpha;
  r.se_mode = se_mode;
  r.df = df;
  double d = ai.mean - human.mean;
  r.t_lower = (d + delta) / se;  // H0: d <= -delta, rejected for large t
  r.t_upper = (d - delta) / se;  // H0: d >= +delta, rejected for small t
  double p_lower = 1.0 - dist::t_cdf(r.t_lower, df);
  double p_upper = dist::t_cdf(r.t_upper, df);
  r.p_value = std::max(p_lower, p_upper);
  r.is_equivalent = r.p_value < alpha;
  return r;
}

}  // namespace gabm
