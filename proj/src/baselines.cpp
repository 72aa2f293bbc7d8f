#include "gabm/baselines.hpp"

#include <cstdlib>

#include "gabm/csv.hpp"
#include "gabm/errors.hpp"

namespace gabm {
namespace {

double to_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw SchemaError("bad number for " + what + ": '" + s + "'");
  return v;
}

void expect_header(const std::vector<std::string>& got,
                   const std::vector<std::string>& want,
                   const std::string& path) {
  if (got != want) throw SchemaError("unexpected header in " + path);
}

}  // namespace

ReportedP parse_reported_p(const std::string& text) {
  ReportedP p;
  if (!text.empty() && text.front() == '<') {
    p.upper_bound = true;
    p.value = to_double(text.substr(1), "p_value");
  } else {
    p.value = to_double(text, "p_value");
  }
  return p;
}

std::vector<GroupSummary> load_group_summaries(const std::string& path) {
  auto rows = csv::parse(csv::read_file(path));
  if (rows.empty()) throw SchemaError("empty summaries file: " + path);
  expect_header(rows[0], {"group_id", "variable", "n", "mean", "sd"}, path);
  std::vector<GroupSummary> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 5) throw SchemaError("bad row in " + path);
    GroupSummary s;
    s.group_id = r[0];
    s.variable = outcome_variable_from_string(r[1]);
    s.n = static_cast<int>(to_double(r[2], "n"));
    s.mean = to_double(r[3], "mean");
    s.sd = to_double(r[4], "sd");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ReferencePath> load_reference_paths(const std::string& path) {
  auto rows = csv::parse(csv::read_file(path));
  if (rows.empty()) throw SchemaError("empty path table: " + path);
  expect_header(rows[0],
                {"group_id", "lhs", "op", "rhs", "estimate", "std_error", "p_value"},
                path);
  std::vector<ReferencePath> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 7) throw SchemaError("bad row in " + path);
    ReferencePath p;
    p.group_id = r[0];
    p.lhs = r[1];
    p.op = r[2];
    p.rhs = r[3];
    p.estimate = to_double(r[4], "estimate");
    p.std_error = to_double(r[5], "std_error");
    p.p = parse_reported_p(r[6]);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ReferenceIndirect> load_reference_indirect(const std::string& path) {
  auto rows = csv::parse(csv::read_file(path));
  if (rows.empty()) throw SchemaError("empty indirect table: " + path);
  expect_header(rows[0],
                {"group_id", "effect", "estimate", "bootstrap_se", "ci_low",
                 "ci_high", "p_value", "significant"},
                path);
  std::vector<ReferenceIndirect> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 8) throw SchemaError("bad row in " + path);
    ReferenceIndirect e;
    e.group_id = r[0];
    e.effect = r[1];
    e.estimate = to_double(r[2], "estimate");
    e.bootstrap_se = to_double(r[3], "bootstrap_se");
    e.ci_low = to_double(r[4], "ci_low");
    e.ci_high = to_double(r[5], "ci_high");
    e.p = parse_reported_p(r[6]);
    if (r[7] == "yes") {
      e.significant = true;
    } else if (r[7] == "no") {
      e.significant = false;
    } else {
      throw SchemaError("bad significant flag '" + r[7] + "' in " + path);
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace gabm
