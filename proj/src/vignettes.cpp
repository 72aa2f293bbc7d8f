#include "gabm/vignettes.hpp"

#include <span>

#include <json.hpp>

#include "gabm/agents.hpp"
#include "gabm/csv.hpp"
#include "gabm/errors.hpp"

namespace gabm {

std::string render_placeholders(
    const std::string& text,
    const std::map<std::string, std::string>& replacements) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '{') {
      out += text[i++];
      continue;
    }
    size_t close = text.find('}', i);
    if (close == std::string::npos)
      throw SchemaError("unterminated placeholder in vignette text");
    std::string token = text.substr(i + 1, close - i - 1);
    auto it = replacements.find(token);
    if (it == replacements.end())
      throw SchemaError("unresolved placeholder {" + token + "} in vignette text");
    out += it->second;
    i = close + 1;
  }
  return out;
}

namespace {

constexpr const char* kVignetteFields[] = {"condition", "role", "scenario_text",
                                           "outcome_text"};
constexpr const char* kConditionFields[] = {"service_outcome", "tip_adjustable",
                                            "tip_visibility"};

void reject_unknown_fields(const nlohmann::json& obj,
                           std::span<const char* const> allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* name : allowed)
      if (it.key() == name) known = true;
    if (!known)
      throw SchemaError("unknown field '" + it.key() + "' in " + where);
  }
}

}  // namespace

VignetteLibrary VignetteLibrary::load(const std::string& path) {
  return from_json(csv::read_file(path));
}

VignetteLibrary VignetteLibrary::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("vignette JSON parse error: ") + e.what());
  }
  if (!j.is_array()) throw SchemaError("vignette library must be a JSON array");

  VignetteLibrary lib;
  for (const auto& entry : j) {
    if (!entry.is_object()) throw SchemaError("vignette entry must be an object");
    reject_unknown_fields(entry, kVignetteFields, "vignette entry");
    const auto& cond_json = entry.at("condition");
    reject_unknown_fields(cond_json, kConditionFields, "vignette condition");

    Vignette v;
    v.condition.service_outcome =
        service_outcome_from_string(cond_json.at("service_outcome").get<std::string>());
    v.condition.tip_adjustable = cond_json.at("tip_adjustable").get<bool>();
    v.condition.tip_visibility =
        tip_visibility_from_string(cond_json.at("tip_visibility").get<std::string>());
    v.role = role_from_string(entry.at("role").get<std::string>());
    v.scenario_text = entry.at("scenario_text").get<std::string>();
    v.outcome_text = entry.at("outcome_text").get<std::string>();

    auto key = std::pair{v.condition.canonical_index(), static_cast<int>(v.role)};
    if (lib.entries_.count(key))
      throw SchemaError("duplicate vignette for (" + v.condition.key() + ", " +
                        to_string(v.role) + ")");
    lib.entries_.emplace(key, std::move(v));
  }

  // Full coverage: every condition, both roles.
  std::string missing;
  for (const auto& c : enumerate_conditions()) {
    for (Role role : {Role::customer, Role::worker}) {
      if (!lib.entries_.count({c.canonical_index(), static_cast<int>(role)})) {
        if (!missing.empty()) missing += ", ";
        missing += "(" + c.key() + ", " + to_string(role) + ")";
      }
    }
  }
  if (!missing.empty())
    throw SchemaError("vignette library is missing entries: " + missing);
  return lib;
}

std::string VignetteLibrary::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [key, v] : entries_) {
    arr.push_back(
        {{"condition",
          {{"service_outcome", to_string(v.condition.service_outcome)},
           {"tip_adjustable", v.condition.tip_adjustable},
           {"tip_visibility", to_string(v.condition.tip_visibility)}}},
         {"role", to_string(v.role)},
         {"scenario_text", v.scenario_text},
         {"outcome_text", v.outcome_text}});
  }
  return arr.dump(2) + "\n";
}

const Vignette& VignetteLibrary::get(const ExperimentCondition& condition,
                                     Role role) const {
  auto it = entries_.find({condition.canonical_index(), static_cast<int>(role)});
  if (it == entries_.end())
    throw Error("no vignette for (" + condition.key() + ", " + to_string(role) + ")");
  return it->second;
}

namespace {

const char* kLikertSpec =
    "SATISFACTION: [a single whole number from 1 (extremely dissatisfied) to 7 "
    "(extremely satisfied)]\n"
    "REASONING: [a brief explanation for your rating]";

}  // namespace

PromptBundle build_customer_prompt(const VignetteLibrary& library,
                                   const ExperimentCondition& condition,
                                   Money price, Money initial_tip) {
  if (price <= Money::from_cents(0))
    throw std::invalid_argument("build_customer_prompt: price must be > 0");
  const Vignette& v = library.get(condition, Role::customer);

  PromptBundle bundle;
  bundle.role = Role::customer;
  bundle.condition = condition;
  bundle.body_text =
      render_placeholders(v.scenario_text, {{"price", price.str_with_symbol()},
                                            {"initial_tip", initial_tip.str_with_symbol()}});
  bundle.body_text += "\n\n";
  bundle.body_text += v.outcome_text;

  if (condition.tip_adjustable) {
    bundle.body_text +=
        "\n\nThe delivery is complete. You may now keep your tip of " +
        initial_tip.str_with_symbol() +
        " as it is, remove it entirely, or adjust it to a different amount.";
    bundle.response_format_spec =
        "Respond using exactly these labeled lines:\n"
        "TIP DECISION: [keep/remove/adjust]\n"
        "NEW TIP AMOUNT: [dollar amount, only if you chose adjust]\n" +
        std::string(kLikertSpec);
  } else {
    bundle.body_text += "\n\nThe delivery is complete.";
    bundle.response_format_spec =
        "Respond using exactly these labeled lines:\n" + std::string(kLikertSpec);
  }
  return bundle;
}

PromptBundle build_worker_prompt(const VignetteLibrary& library,
                                 const ExperimentCondition& condition,
                                 const CustomerResult& customer_result,
                                 Money initial_tip) {
  const Vignette& v = library.get(condition, Role::worker);

  std::string visibility_note;
  if (condition.tip_visibility == TipVisibility::before) {
    visibility_note = "The app showed you the customer's " +
                      initial_tip.str_with_symbol() +
                      " tip before you accepted this delivery.";
  } else {
    visibility_note =
        "The app does not show tip amounts until after the delivery is "
        "completed, so you accepted this delivery without seeing the tip.";
  }

  PromptBundle bundle;
  bundle.role = Role::worker;
  bundle.condition = condition;
  bundle.body_text =
      render_placeholders(v.scenario_text, {{"tip_visibility_note", visibility_note}});
  bundle.body_text += "\n\n";
  bundle.body_text += v.outcome_text;

  bundle.body_text += "\n\nThe delivery is complete.";
  Money final_tip = customer_result.final_tip;
  if (condition.tip_visibility == TipVisibility::before) {
    if (final_tip == initial_tip) {
      bundle.body_text += " The customer's tip is unchanged from the " +
                          initial_tip.str_with_symbol() + " you saw before accepting.";
    } else {
      bundle.body_text += " The customer has changed the " +
                          initial_tip.str_with_symbol() +
                          " tip you saw before accepting; the final tip is " +
                          final_tip.str_with_symbol() + ".";
    }
  } else {
    bundle.body_text +=
        " The app now shows your tip for this delivery: " + final_tip.str_with_symbol() + ".";
  }
  bundle.body_text += " Your final earnings for this delivery include a " +
                      final_tip.str_with_symbol() + " tip.";

  bundle.response_format_spec =
      "Respond using exactly these labeled lines:\n" + std::string(kLikertSpec);
  return bundle;
}

}  // namespace gabm
