#pragma once

#include <string>
#include <vector>

#include "gabm/stats.hpp"

namespace gabm {

// A reported p-value: numeric, possibly only known as an upper bound
// (printed "<0.001").
struct ReportedP {
  double value = 1.0;
  bool upper_bound = false;

  bool significant(double alpha) const {
    return upper_bound ? value <= alpha : value < alpha;
  }
};

ReportedP parse_reported_p(const std::string& text);

struct ReferencePath {
  std::string group_id;
  std::string lhs;
  std::string op;  // "~" regression, "~~" residual variance
  std::string rhs;
  double estimate = 0.0;
  double std_error = 0.0;
  ReportedP p;
};

struct ReferenceIndirect {
  std::string group_id;
  std::string effect;  // "indirect_joint" or "indirect_diff"
  double estimate = 0.0;
  double bootstrap_se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  ReportedP p;
  bool significant = false;
};

// Loaders for the bundled reference tables under data/baselines/.
std::vector<GroupSummary> load_group_summaries(const std::string& path);
std::vector<ReferencePath> load_reference_paths(const std::string& path);
std::vector<ReferenceIndirect> load_reference_indirect(const std::string& path);

}  // namespace gabm
