#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gabm/agents.hpp"
#include "gabm/errors.hpp"
#include "gabm/vignettes.hpp"
#include "fixtures.hpp"

#include <json.hpp>

using namespace gabm;

namespace {

VignetteLibrary default_library() {
  return VignetteLibrary::load(fixtures::data_dir() + "/vignettes.json");
}

}  // namespace

TEST_CASE("default library loads with full coverage") {
  auto lib = default_library();
  CHECK(lib.size() == 32);
  for (const auto& c : enumerate_conditions()) {
    CHECK_NOTHROW(lib.get(c, Role::customer));
    CHECK_NOTHROW(lib.get(c, Role::worker));
  }
}

TEST_CASE("library round trips through JSON") {
  auto lib = default_library();
  auto back = VignetteLibrary::from_json(lib.to_json());
  CHECK(back == lib);
}

TEST_CASE("schema violations are rejected with names") {
  auto lib = default_library();
  nlohmann::json arr = nlohmann::json::parse(lib.to_json());

  SUBCASE("missing entry names the key") {
    nlohmann::json pruned = nlohmann::json::array();
    for (const auto& e : arr) {
      if (e["condition"]["service_outcome"] == "fails" && e["role"] == "worker" &&
          e["condition"]["tip_adjustable"] == false &&
          e["condition"]["tip_visibility"] == "after")
        continue;
      pruned.push_back(e);
    }
    try {
      VignetteLibrary::from_json(pruned.dump());
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("fails/fixed/after") != std::string::npos);
      CHECK(std::string(e.what()).find("worker") != std::string::npos);
    }
  }

  SUBCASE("duplicate entry rejected") {
    arr.push_back(arr[0]);
    CHECK_THROWS_AS(VignetteLibrary::from_json(arr.dump()), SchemaError);
  }

  SUBCASE("unknown field rejected") {
    arr[0]["surprise"] = 1;
    CHECK_THROWS_AS(VignetteLibrary::from_json(arr.dump()), SchemaError);
  }

  SUBCASE("malformed JSON reports a parse error") {
    CHECK_THROWS_AS(VignetteLibrary::from_json("[{\"condition\":"), SchemaError);
  }
}

TEST_CASE("customer and worker outcome texts align per condition") {
  auto lib = default_library();
  // The same outcome level maps to the matched narrative pair: a worker
  // facing "order ready / no wait" must pair with the customer's "arrived
  // earlier than expected" text, and so on down the scale.
  for (const auto& c : enumerate_conditions()) {
    const auto& cust = lib.get(c, Role::customer);
    const auto& work = lib.get(c, Role::worker);
    switch (c.service_outcome) {
      case ServiceOutcome::exceeds:
        CHECK(cust.outcome_text.find("earlier than expected") != std::string::npos);
        CHECK(work.outcome_text.find("did not have to wait") != std::string::npos);
        break;
      case ServiceOutcome::meets:
        CHECK(cust.outcome_text.find("arrived on time") != std::string::npos);
        CHECK(work.outcome_text.find("deliver the order on time") != std::string::npos);
        break;
      case ServiceOutcome::below:
        CHECK(cust.outcome_text.find("slightly late") != std::string::npos);
        CHECK(work.outcome_text.find("slightly later than expected") != std::string::npos);
        break;
      case ServiceOutcome::fails:
        CHECK(cust.outcome_text.find("very late") != std::string::npos);
        CHECK(work.outcome_text.find("much later than expected") != std::string::npos);
        break;
    }
  }
}

TEST_CASE("customer prompt interpolation and tip framing") {
  auto lib = default_library();
  ExperimentCondition adjustable{ServiceOutcome::meets, true, TipVisibility::before};

  auto bundle = build_customer_prompt(lib, adjustable, Money::parse("30.00"),
                                      Money::parse("9.00"));
  auto text = bundle.full_text();
  CHECK(text.find("$30") != std::string::npos);
  CHECK(text.find("$9.00") != std::string::npos);
  CHECK(text.find("TIP DECISION") != std::string::npos);
  CHECK(text.find("{") == std::string::npos);
  // Ends with the structured response instructions.
  CHECK(text.rfind(bundle.response_format_spec) ==
        text.size() - bundle.response_format_spec.size());

  ExperimentCondition fixed{ServiceOutcome::meets, false, TipVisibility::before};
  auto fixed_bundle = build_customer_prompt(lib, fixed, Money::parse("30.00"),
                                            Money::parse("9.00"));
  CHECK(fixed_bundle.full_text().find("TIP DECISION") == std::string::npos);

  // Purity: identical inputs, identical text.
  auto again = build_customer_prompt(lib, adjustable, Money::parse("30.00"),
                                     Money::parse("9.00"));
  CHECK(again.full_text() == bundle.full_text());

  CHECK_THROWS_AS(
      build_customer_prompt(lib, adjustable, Money::parse("0"), Money::parse("9.00")),
      std::invalid_argument);
}

TEST_CASE("worker prompt visibility and final tip disclosure") {
  auto lib = default_library();
  CustomerResult customer;
  customer.satisfaction = 3;
  customer.reasoning = "late";
  customer.tip_decision = TipDecision::adjust;
  customer.final_tip = Money::parse("4.50");

  ExperimentCondition before{ServiceOutcome::below, true, TipVisibility::before};
  auto bundle = build_worker_prompt(lib, before, customer, Money::parse("9.00"));
  auto text = bundle.full_text();
  CHECK(text.find("before you accepted") != std::string::npos);
  CHECK(text.find("$4.50") != std::string::npos);
  CHECK(text.find("$9.00") != std::string::npos);
  CHECK(text.find("SATISFACTION") != std::string::npos);
  CHECK(text.find("TIP DECISION") == std::string::npos);
  CHECK(text.find("{") == std::string::npos);

  ExperimentCondition after{ServiceOutcome::below, true, TipVisibility::after};
  auto hidden = build_worker_prompt(lib, after, customer, Money::parse("9.00"));
  CHECK(hidden.full_text().find("before you accepted") == std::string::npos);
  CHECK(hidden.full_text().find("$4.50") != std::string::npos);

  auto again = build_worker_prompt(lib, before, customer, Money::parse("9.00"));
  CHECK(again.full_text() == bundle.full_text());
}

TEST_CASE("unresolved placeholders are an error") {
  CHECK_THROWS_AS(render_placeholders("tip is {initial_tip}", {}), SchemaError);
  CHECK_THROWS_AS(render_placeholders("broken {initial_tip", {{"initial_tip", "$9"}}),
                  SchemaError);
  CHECK(render_placeholders("pay {price} now", {{"price", "$30.00"}}) ==
        "pay $30.00 now");
}
