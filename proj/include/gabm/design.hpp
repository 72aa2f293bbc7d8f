#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gabm {

enum class ServiceOutcome { fails, below, meets, exceeds };
enum class TipVisibility { after, before };
enum class Role { customer, worker };

const char* to_string(ServiceOutcome outcome);
const char* to_string(TipVisibility visibility);
const char* to_string(Role role);
ServiceOutcome service_outcome_from_string(const std::string& s);
TipVisibility tip_visibility_from_string(const std::string& s);
Role role_from_string(const std::string& s);

// One cell of the 4 (service outcome) x 2 (tip adjustability) x
// 2 (tip visibility) design.
struct ExperimentCondition {
  ServiceOutcome service_outcome = ServiceOutcome::fails;
  bool tip_adjustable = false;
  TipVisibility tip_visibility = TipVisibility::after;

  // Stable "outcome/adjustable|fixed/visibility" key, e.g.
  // "meets/adjustable/before". Used for seeding, journals and lookups.
  std::string key() const;
  static ExperimentCondition from_key(const std::string& key);

  // Position in the canonical enumeration (outcome major, adjustability,
  // visibility minor); 0..15.
  int canonical_index() const;

  friend bool operator==(const ExperimentCondition& a,
                         const ExperimentCondition& b) = default;
};

// All 16 conditions in canonical order. Row order of every dataset and
// plan derives from this, so it is fixed: fails/below/meets/exceeds by
// outcome, non-adjustable before adjustable, after before before.
std::vector<ExperimentCondition> enumerate_conditions();

// Inputs to the fixed-width replication formula.
struct SampleSizeInputs {
  double pilot_sd = 0.0;    // satisfaction points
  double half_width = 1.0;  // h, satisfaction points
  double z_quantile = 1.96; // z for the chosen confidence level
};

// ceil((z * s / h)^2), floored at 2 so downstream variance estimates are
// defined. Throws std::invalid_argument on non-positive half_width or z.
int required_replications(const SampleSizeInputs& inputs);

struct PlanEntry {
  ExperimentCondition condition;
  int replicate = 1;  // 1-based within the cell
  uint64_t seed = 0;
};

// Seeded schedule of every (condition, replicate) cell. Deterministic in
// (master_seed, replications): seeds come from derive_seed(master, key, i).
struct ReplicationPlan {
  uint64_t master_seed = 0;
  int replications_per_cell = 1;
  std::vector<PlanEntry> entries;

  std::string to_json() const;
  static ReplicationPlan from_json(const std::string& text);
};

ReplicationPlan build_plan(int replications, uint64_t master_seed);

}  // namespace gabm
