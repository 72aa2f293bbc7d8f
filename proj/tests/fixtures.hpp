#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "gabm/baselines.hpp"
#include "gabm/stats.hpp"

namespace fixtures {

inline std::string data_dir() {
  if (const char* env = std::getenv("GABM_DATA_DIR")) return env;
  return "data";
}

inline std::vector<gabm::GroupSummary> reference_summaries() {
  return gabm::load_group_summaries(data_dir() + "/baselines/group_summaries.csv");
}

inline std::vector<gabm::ReferencePath> reference_paths() {
  return gabm::load_reference_paths(data_dir() + "/baselines/path_models.csv");
}

inline std::vector<gabm::ReferenceIndirect> reference_indirect() {
  return gabm::load_reference_indirect(data_dir() + "/baselines/indirect_effects.csv");
}

inline std::vector<gabm::GroupSummary> summaries_for(
    const std::vector<gabm::GroupSummary>& all, gabm::OutcomeVariable variable) {
  std::vector<gabm::GroupSummary> out;
  for (const auto& s : all)
    if (s.variable == variable) out.push_back(s);
  return out;
}

inline const gabm::GroupSummary& find_summary(
    const std::vector<gabm::GroupSummary>& all, const std::string& group,
    gabm::OutcomeVariable variable) {
  for (const auto& s : all)
    if (s.group_id == group && s.variable == variable) return s;
  throw std::runtime_error("missing summary: " + group);
}

// One-sample Kolmogorov-Smirnov test against Uniform(0,1); asymptotic p.
inline double ks_uniform_p(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    double hi = (i + 1) / n - values[i];
    double lo = values[i] - i / n;
    d = std::max(d, std::max(hi, lo));
  }
  double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = 2.0 * std::pow(-1.0, j - 1) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace fixtures
