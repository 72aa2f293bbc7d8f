#pragma once

#include <map>
#include <string>
#include <vector>

#include "gabm/design.hpp"
#include "gabm/money.hpp"

namespace gabm {

struct CustomerResult;  // agents.hpp

// One role-specific scenario for one condition. scenario_text carries
// brace placeholders resolved at prompt-build time ({price} and
// {initial_tip} for customers, {tip_visibility_note} for workers);
// outcome_text is the standardized service-outcome narrative.
struct Vignette {
  ExperimentCondition condition;
  Role role = Role::customer;
  std::string scenario_text;
  std::string outcome_text;

  friend bool operator==(const Vignette&, const Vignette&) = default;
};

// Immutable after load; safe to share across threads.
class VignetteLibrary {
 public:
  // Strict schema: exactly 16 conditions x 2 roles, no unknown fields,
  // no duplicates. Errors name the offending or missing keys.
  static VignetteLibrary load(const std::string& path);
  static VignetteLibrary from_json(const std::string& text);

  std::string to_json() const;

  const Vignette& get(const ExperimentCondition& condition, Role role) const;

  size_t size() const { return entries_.size(); }

  friend bool operator==(const VignetteLibrary& a, const VignetteLibrary& b) {
    return a.entries_ == b.entries_;
  }

 private:
  // keyed by (canonical condition index, role)
  std::map<std::pair<int, int>, Vignette> entries_;
};

// The assembled prompt for one agent: scenario body plus the structured
// response instructions it must follow. full_text() is what goes to the
// provider; it always ends with the response format spec.
struct PromptBundle {
  Role role = Role::customer;
  std::string body_text;
  std::string response_format_spec;
  ExperimentCondition condition;

  std::string full_text() const { return body_text + "\n\n" + response_format_spec; }
};

// Pure functions of their inputs; identical inputs give identical text.
PromptBundle build_customer_prompt(const VignetteLibrary& library,
                                   const ExperimentCondition& condition,
                                   Money price, Money initial_tip);

PromptBundle build_worker_prompt(const VignetteLibrary& library,
                                 const ExperimentCondition& condition,
                                 const CustomerResult& customer_result,
                                 Money initial_tip);

// Replaces {token} occurrences; a token left unresolved (or one without a
// replacement) is an error rather than silent leakage into a prompt.
std::string render_placeholders(
    const std::string& text,
    const std::map<std::string, std::string>& replacements);

}  // namespace gabm
