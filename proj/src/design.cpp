#include "gabm/design.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "gabm/errors.hpp"
#include "gabm/rand.hpp"

namespace gabm {

const char* to_string(ServiceOutcome outcome) {
  switch (outcome) {
    case ServiceOutcome::fails: return "fails";
    case ServiceOutcome::below: return "below";
    case ServiceOutcome::meets: return "meets";
    case ServiceOutcome::exceeds: return "exceeds";
  }
  throw std::invalid_argument("bad ServiceOutcome");
}

const char* to_string(TipVisibility visibility) {
  return visibility == TipVisibility::before ? "before" : "after";
}

const char* to_string(Role role) {
  return role == Role::customer ? "customer" : "worker";
}

ServiceOutcome service_outcome_from_string(const std::string& s) {
  if (s == "fails") return ServiceOutcome::fails;
  if (s == "below") return ServiceOutcome::below;
  if (s == "meets") return ServiceOutcome::meets;
  if (s == "exceeds") return ServiceOutcome::exceeds;
  throw SchemaError("unknown service_outcome: " + s);
}

TipVisibility tip_visibility_from_string(const std::string& s) {
  if (s == "before") return TipVisibility::before;
  if (s == "after") return TipVisibility::after;
  throw SchemaError("unknown tip_visibility: " + s);
}

Role role_from_string(const std::string& s) {
  if (s == "customer") return Role::customer;
  if (s == "worker") return Role::worker;
  throw SchemaError("unknown role: " + s);
}

std::string ExperimentCondition::key() const {
  std::string k = to_string(service_outcome);
  k += '/';
  k += tip_adjustable ? "adjustable" : "fixed";
  k += '/';
  k += to_string(tip_visibility);
  return k;
}

ExperimentCondition ExperimentCondition::from_key(const std::string& key) {
  auto first = key.find('/');
  auto second = key.find('/', first == std::string::npos ? 0 : first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw SchemaError("bad condition key: " + key);
  ExperimentCondition c;
  c.service_outcome = service_outcome_from_string(key.substr(0, first));
  std::string adj = key.substr(first + 1, second - first - 1);
  if (adj == "adjustable") {
    c.tip_adjustable = true;
  } else if (adj == "fixed") {
    c.tip_adjustable = false;
  } else {
    throw SchemaError("bad adjustability in condition key: " + key);
  }
  c.tip_visibility = tip_visibility_from_string(key.substr(second + 1));
  return c;
}

int ExperimentCondition::canonical_index() const {
  return static_cast<int>(service_outcome) * 4 + (tip_adjustable ? 2 : 0) +
         (tip_visibility == TipVisibility::before ? 1 : 0);
}

std::vector<ExperimentCondition> enumerate_conditions() {
  std::vector<ExperimentCondition> out;
  out.reserve(16);
  for (ServiceOutcome o : {ServiceOutcome::fails, ServiceOutcome::below,
                           ServiceOutcome::meets, ServiceOutcome::exceeds}) {
    for (bool adj : {false, true}) {
      for (TipVisibility v : {TipVisibility::after, TipVisibility::before}) {
        out.push_back({o, adj, v});
      }
    }
  }
  return out;
}

int required_replications(const SampleSizeInputs& inputs) {
  if (!(inputs.half_width > 0.0))
    throw std::invalid_argument("required_replications: half_width must be > 0");
  if (!(inputs.z_quantile > 0.0))
    throw std::invalid_argument("required_replications: z_quantile must be > 0");
  if (inputs.pilot_sd < 0.0)
    throw std::invalid_argument("required_replications: pilot_sd must be >= 0");
  double ratio = inputs.z_quantile * inputs.pilot_sd / inputs.half_width;
  double n = std::ceil(ratio * ratio);
  return n < 2.0 ? 2 : static_cast<int>(n);
}

ReplicationPlan build_plan(int replications, uint64_t master_seed) {
  if (replications < 1)
    throw std::invalid_argument("build_plan: replications must be >= 1");
  ReplicationPlan plan;
  plan.master_seed = master_seed;
  plan.replications_per_cell = replications;
  plan.entries.reserve(16 * static_cast<size_t>(replications));
  for (const auto& condition : enumerate_conditions()) {
    const std::string key = condition.key();
    for (int i = 1; i <= replications; ++i) {
      plan.entries.push_back(
          {condition, i, derive_seed(master_seed, key, static_cast<uint64_t>(i))});
    }
  }
  return plan;
}

namespace {

nlohmann::json condition_to_json(const ExperimentCondition& c) {
  return {{"service_outcome", to_string(c.service_outcome)},
          {"tip_adjustable", c.tip_adjustable},
          {"tip_visibility", to_string(c.tip_visibility)}};
}

ExperimentCondition condition_from_json(const nlohmann::json& j) {
  ExperimentCondition c;
  c.service_outcome = service_outcome_from_string(j.at("service_outcome").get<std::string>());
  c.tip_adjustable = j.at("tip_adjustable").get<bool>();
  c.tip_visibility = tip_visibility_from_string(j.at("tip_visibility").get<std::string>());
  return c;
}

}  // namespace

std::string ReplicationPlan::to_json() const {
  nlohmann::json entries_json = nlohmann::json::array();
  for (const auto& e : entries) {
    entries_json.push_back({{"condition", condition_to_json(e.condition)},
                            {"replicate", e.replicate},
                            {"seed", e.seed}});
  }
  nlohmann::json j = {{"master_seed", master_seed},
                      {"replications_per_cell", replications_per_cell},
                      {"entries", entries_json}};
  return j.dump(2) + "\n";
}

ReplicationPlan ReplicationPlan::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("plan JSON parse error: ") + e.what());
  }
  ReplicationPlan plan;
  plan.master_seed = j.at("master_seed").get<uint64_t>();
  plan.replications_per_cell = j.at("replications_per_cell").get<int>();
  for (const auto& e : j.at("entries")) {
    plan.entries.push_back({condition_from_json(e.at("condition")),
                            e.at("replicate").get<int>(),
                            e.at("seed").get<uint64_t>()});
  }
  return plan;
}

}  // namespace gabm
