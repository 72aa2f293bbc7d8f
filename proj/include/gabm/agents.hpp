#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gabm/design.hpp"
#include "gabm/money.hpp"
#include "gabm/vignettes.hpp"

namespace gabm {

struct AgentParams {
  std::string provider_id;
  std::string model_id;
  double temperature = 0.7;
  double top_p = 0.95;
  int max_retries = 5;
  std::chrono::milliseconds backoff_base{500};
  int max_concurrency = 4;

  void validate() const;
};

struct RawResponse {
  std::string text;
  int attempts = 1;
  std::chrono::milliseconds latency{0};
  std::map<std::string, std::string> provider_metadata;
};

enum class TipDecision { keep, remove, adjust };
const char* to_string(TipDecision decision);
TipDecision tip_decision_from_string(const std::string& s);

struct CustomerResult {
  int satisfaction = 0;  // 1..7
  std::string reasoning;
  std::optional<TipDecision> tip_decision;  // absent in non-adjustable cells
  Money final_tip;
};

struct WorkerResult {
  int satisfaction = 0;  // 1..7
  std::string reasoning;
};

// Extracts the labeled lines, case-insensitively and tolerant of
// surrounding prose. Ratings must be integers in 1..7 (a decimal is
// accepted only when exactly integral); out-of-range or missing mandatory
// fields throw ParseError so the caller can re-prompt. In adjustable
// conditions the tip decision is mandatory and mapped onto final_tip
// (keep -> initial, remove -> 0, adjust -> explicit amount). In
// non-adjustable conditions any stray decision line is ignored and the
// final tip is structurally the initial tip.
CustomerResult parse_customer_response(const RawResponse& raw,
                                       const ExperimentCondition& condition,
                                       Money initial_tip);

WorkerResult parse_worker_response(const RawResponse& raw);

// A completion backend. Implementations: HTTP providers (providers.hpp)
// and the seeded synthetic backend below. call_seed is meaningful only
// for deterministic backends; HTTP providers ignore it.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(const PromptBundle& bundle,
                               const AgentParams& params, uint64_t call_seed) = 0;
};

// Sends with retry: transient transport failures back off
// backoff_base * 2^(attempt-1); attempts are capped at max_retries + 1.
// The sleep hook exists so tests can run without waiting.
RawResponse send_prompt(ChatProvider& provider, const AgentParams& params,
                        const PromptBundle& bundle, uint64_t call_seed = 0,
                        const std::function<void(std::chrono::milliseconds)>& sleep_fn = {});

// Distribution of responses for one (condition, role): satisfaction
// moments discretized onto the 1..7 scale, tip-decision probabilities and
// the adjusted-amount distribution for customers.
struct SyntheticCell {
  double customer_sat_mean = 4.0;
  double customer_sat_sd = 1.0;
  double worker_sat_mean = 4.0;
  double worker_sat_sd = 1.0;
  double p_keep = 1.0;
  double p_remove = 0.0;
  double p_adjust = 0.0;
  double adjust_mean = 0.0;  // dollars
  double adjust_sd = 0.0;
};

class SyntheticProfile {
 public:
  static SyntheticProfile load(const std::string& path);
  static SyntheticProfile from_json(const std::string& text);
  std::string to_json() const;

  // Uniform cell for every condition (handy in tests).
  static SyntheticProfile uniform(const SyntheticCell& cell);

  void set_cell(const ExperimentCondition& condition, const SyntheticCell& cell);
  const SyntheticCell& cell(const ExperimentCondition& condition) const;

  struct ImpliedMoments {
    double mean = 0.0;
    double sd = 0.0;
  };

  // Exact moments of the discretized satisfaction distribution actually
  // sampled from. The discretization is tilted so the implied mean equals
  // the configured mean; the SD is the implied one.
  ImpliedMoments implied_satisfaction(const ExperimentCondition& condition,
                                      Role role) const;

 private:
  std::map<int, SyntheticCell> cells_;  // keyed by canonical condition index
};

// Deterministic agent double: emits text in the exact labeled response
// format, sampling only from (profile, bundle, seed).
RawResponse synthetic_respond(const SyntheticProfile& profile,
                              const PromptBundle& bundle, uint64_t seed);

class SyntheticProvider : public ChatProvider {
 public:
  explicit SyntheticProvider(SyntheticProfile profile, std::string id = "synthetic")
      : profile_(std::move(profile)), id_(std::move(id)) {}
  std::string id() const override { return id_; }
  std::string complete(const PromptBundle& bundle, const AgentParams&,
                       uint64_t call_seed) override {
    return synthetic_respond(profile_, bundle, call_seed).text;
  }

 private:
  SyntheticProfile profile_;
  std::string id_;
};

// One complete customer-worker encounter.
struct DyadRecord {
  std::string run_id;
  std::string group_id;  // model name or "human"
  std::string dyad_id;
  ExperimentCondition condition;
  int replicate = 1;
  Money price;
  Money initial_tip;
  CustomerResult customer;
  WorkerResult worker;
  std::string started_at;
  std::string finished_at;
};

// Journal hook: called once per agent call with everything needed for the
// JSONL journal. parsed_json is empty on failure.
struct AgentCallLog {
  Role role = Role::customer;
  uint64_t seed = 0;
  std::string prompt_hash;
  std::string raw_text;
  std::string parsed_json;
  std::string error;
  int attempts = 1;
  std::string started_at;
  std::string finished_at;
};
using AgentCallSink = std::function<void(const AgentCallLog&)>;

struct DyadOutcome {
  std::optional<DyadRecord> record;
  std::string failure;  // nonempty when the dyad is unusable

  bool failed() const { return !failure.empty(); }
};

// Executes the full dyad sequence: customer prompt -> customer parse ->
// worker prompt (with the parsed final tip embedded) -> worker parse.
// Parse failures re-prompt with an appended format reminder, counted
// against the shared retry budget. Unrecoverable failures are returned
// (and journaled through the sink), never silently dropped.
DyadOutcome run_dyad(const ExperimentCondition& condition, uint64_t replicate_seed,
                     ChatProvider& customer_agent, ChatProvider& worker_agent,
                     const VignetteLibrary& library, Money price, Money initial_tip,
                     const AgentParams& params, const std::string& group_id,
                     const std::string& run_id, int replicate,
                     const std::string& reprompt_reminder,
                     const AgentCallSink& sink = {},
                     const std::function<void(std::chrono::milliseconds)>& sleep_fn = {});

}  // namespace gabm
