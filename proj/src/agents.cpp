#include "gabm/agents.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "gabm/csv.hpp"
#include "gabm/dataset.hpp"
#include "gabm/distributions.hpp"
#include "gabm/errors.hpp"
#include "gabm/rand.hpp"

namespace gabm {

void AgentParams::validate() const {
  if (temperature < 0.0 || temperature > 2.0)
    throw std::invalid_argument("AgentParams: temperature must be in [0, 2]");
  if (!(top_p > 0.0 && top_p <= 1.0))
    throw std::invalid_argument("AgentParams: top_p must be in (0, 1]");
  if (max_retries < 0)
    throw std::invalid_argument("AgentParams: max_retries must be >= 0");
  if (max_concurrency < 1)
    throw std::invalid_argument("AgentParams: max_concurrency must be >= 1");
}

const char* to_string(TipDecision decision) {
  switch (decision) {
    case TipDecision::keep: return "keep";
    case TipDecision::remove: return "remove";
    case TipDecision::adjust: return "adjust";
  }
  throw std::invalid_argument("bad TipDecision");
}

TipDecision tip_decision_from_string(const std::string& s) {
  if (s == "keep") return TipDecision::keep;
  if (s == "remove") return TipDecision::remove;
  if (s == "adjust") return TipDecision::adjust;
  throw SchemaError("unknown tip decision: " + s);
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Label variants accepted when scanning a response. Matching is done on a
// lowercased copy; labels must be followed by ':'.
const char* kLabels[] = {"satisfaction", "reasoning", "tip decision",
                         "new tip amount"};

struct LabelHit {
  size_t label_start = std::string::npos;
  size_t value_start = std::string::npos;
};

// Finds "label :" case-insensitively, tolerating spaces before the colon.
LabelHit find_label(const std::string& lower, const std::string& label,
                    size_t from = 0) {
  size_t pos = from;
  while ((pos = lower.find(label, pos)) != std::string::npos) {
    size_t after = pos + label.size();
    while (after < lower.size() && (lower[after] == ' ' || lower[after] == '\t'))
      ++after;
    if (after < lower.size() && lower[after] == ':') {
      return {pos, after + 1};
    }
    pos += label.size();
  }
  return {};
}

// Value runs from the label's colon to the next known label or the end.
std::string labeled_block(const std::string& text, const std::string& lower,
                          const std::string& label) {
  LabelHit hit = find_label(lower, label);
  if (hit.value_start == std::string::npos) return {};
  size_t end = text.size();
  for (const char* other : kLabels) {
    LabelHit next = find_label(lower, other, hit.value_start);
    if (next.label_start != std::string::npos && next.label_start < end)
      end = next.label_start;
  }
  std::string value = text.substr(hit.value_start, end - hit.value_start);
  // Trim whitespace and stray separators left behind by inline layouts
  // like "satisfaction: 7 -- REASONING: ...".
  auto is_junk = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '-' || c == '*' ||
           c == '|' || c == ';' || c == ',';
  };
  size_t b = 0, e = value.size();
  while (b < e && is_junk(value[b])) ++b;
  while (e > b && is_junk(value[e - 1])) --e;
  return value.substr(b, e - b);
}

// Strips a leading em dash or similar unicode junk is already handled by
// is_junk above for ASCII; multibyte dashes are removed here.
std::string strip_utf8_dashes(std::string value) {
  static const std::string em = "\xe2\x80\x94";  // U+2014
  static const std::string en = "\xe2\x80\x93";  // U+2013
  for (const std::string& dash : {em, en}) {
    size_t pos;
    while ((pos = value.find(dash)) == 0) value.erase(0, dash.size());
    while (!value.empty() &&
           (pos = value.rfind(dash)) != std::string::npos &&
           pos == value.size() - dash.size())
      value.erase(pos);
  }
  size_t b = 0, e = value.size();
  while (b < e && std::isspace(static_cast<unsigned char>(value[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(value[e - 1]))) --e;
  return value.substr(b, e - b);
}

int parse_satisfaction(const std::string& text, const std::string& lower) {
  std::string value = strip_utf8_dashes(labeled_block(text, lower, "satisfaction"));
  if (value.empty())
    throw ParseError(ParseError::Kind::missing_field,
                     "response has no SATISFACTION line");
  // Take the leading numeric token; anything after is prose.
  size_t i = 0;
  while (i < value.size() &&
         (std::isdigit(static_cast<unsigned char>(value[i])) || value[i] == '.'))
    ++i;
  std::string token = value.substr(0, i);
  if (token.empty())
    throw ParseError(ParseError::Kind::missing_field,
                     "SATISFACTION value is not numeric: '" + value + "'");
  double rating;
  try {
    rating = std::stod(token);
  } catch (...) {
    throw ParseError(ParseError::Kind::missing_field,
                     "SATISFACTION value is not numeric: '" + value + "'");
  }
  // A decimal is accepted only when exactly integral; anything else would
  // be silent coercion of fabricated data.
  if (rating != std::floor(rating))
    throw ParseError(ParseError::Kind::not_integral,
                     "SATISFACTION rating is not a whole number: " + token);
  if (rating < 1.0 || rating > 7.0)
    throw ParseError(ParseError::Kind::out_of_range,
                     "SATISFACTION rating outside 1-7: " + token);
  return static_cast<int>(rating);
}

std::string parse_reasoning(const std::string& text, const std::string& lower) {
  std::string value = strip_utf8_dashes(labeled_block(text, lower, "reasoning"));
  if (value.empty())
    throw ParseError(ParseError::Kind::missing_field,
                     "response has no usable REASONING line");
  return value;
}

std::string iso_timestamp_now() {
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
  auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now - secs).count();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

}  // namespace

CustomerResult parse_customer_response(const RawResponse& raw,
                                       const ExperimentCondition& condition,
                                       Money initial_tip) {
  if (raw.text.empty())
    throw ParseError(ParseError::Kind::empty_response, "empty response text");
  const std::string lower = lowercase(raw.text);

  CustomerResult result;
  result.satisfaction = parse_satisfaction(raw.text, lower);
  result.reasoning = parse_reasoning(raw.text, lower);

  if (!condition.tip_adjustable) {
    // Structural constraint: the tip cannot change. Stray decision lines
    // are ignored rather than trusted.
    result.final_tip = initial_tip;
    return result;
  }

  std::string decision_text =
      lowercase(strip_utf8_dashes(labeled_block(raw.text, lower, "tip decision")));
  if (decision_text.empty())
    throw ParseError(ParseError::Kind::missing_field,
                     "adjustable condition but no TIP DECISION line");
  // Accept a bare keyword optionally followed by prose ("keep the tip").
  TipDecision decision;
  if (decision_text.rfind("keep", 0) == 0) {
    decision = TipDecision::keep;
  } else if (decision_text.rfind("remove", 0) == 0) {
    decision = TipDecision::remove;
  } else if (decision_text.rfind("adjust", 0) == 0) {
    decision = TipDecision::adjust;
  } else {
    throw ParseError(ParseError::Kind::missing_field,
                     "TIP DECISION is not keep/remove/adjust: '" + decision_text + "'");
  }
  result.tip_decision = decision;

  switch (decision) {
    case TipDecision::keep:
      result.final_tip = initial_tip;
      break;
    case TipDecision::remove:
      result.final_tip = Money::from_cents(0);
      break;
    case TipDecision::adjust: {
      std::string amount =
          strip_utf8_dashes(labeled_block(raw.text, lower, "new tip amount"));
      if (amount.empty())
        throw ParseError(ParseError::Kind::missing_field,
                         "TIP DECISION adjust without a NEW TIP AMOUNT");
      result.final_tip = Money::parse(amount);  // rejects negatives
      break;
    }
  }
  return result;
}

WorkerResult parse_worker_response(const RawResponse& raw) {
  if (raw.text.empty())
    throw ParseError(ParseError::Kind::empty_response, "empty response text");
  const std::string lower = lowercase(raw.text);
  WorkerResult result;
  result.satisfaction = parse_satisfaction(raw.text, lower);
  result.reasoning = parse_reasoning(raw.text, lower);
  return result;
}

RawResponse send_prompt(ChatProvider& provider, const AgentParams& params,
                        const PromptBundle& bundle, uint64_t call_seed,
                        const std::function<void(std::chrono::milliseconds)>& sleep_fn) {
  params.validate();
  auto sleep = sleep_fn ? sleep_fn : [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 1;; ++attempt) {
    try {
      RawResponse response;
      response.text = provider.complete(bundle, params, call_seed);
      response.attempts = attempt;
      response.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - start);
      response.provider_metadata["provider"] = provider.id();
      return response;
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt > params.max_retries) throw;
      sleep(params.backoff_base * (1LL << (attempt - 1)));
    }
  }
}

// --- synthetic backend -----------------------------------------------------

namespace {

// Discrete satisfaction distribution over 1..7: a normal discretized at
// half-integer cuts, then exponentially tilted so the implied mean equals
// the configured mean exactly.
struct DiscreteLikert {
  double p[7];

  static DiscreteLikert build(double mean, double sd) {
    DiscreteLikert d{};
    if (mean < 1.0 || mean > 7.0)
      throw std::invalid_argument("satisfaction mean outside the 1-7 scale");
    if (sd < 0.0) throw std::invalid_argument("satisfaction sd must be >= 0");
    if (sd == 0.0) {
      double nearest = std::round(mean);
      for (int i = 0; i < 7; ++i) d.p[i] = (i + 1 == nearest) ? 1.0 : 0.0;
      return d;
    }
    for (int i = 0; i < 7; ++i) {
      double lo = (i == 0) ? -1e30 : (i + 0.5);
      double hi = (i == 6) ? 1e30 : (i + 1.5);
      d.p[i] = dist::normal_cdf((hi - mean) / sd) - dist::normal_cdf((lo - mean) / sd);
    }
    double sum = 0.0;
    for (double v : d.p) sum += v;
    for (double& v : d.p) v /= sum;

    // Tilt weights by exp(lambda * i) and bisect lambda until the mean
    // matches. Monotone in lambda, so bisection is safe.
    auto tilted_mean = [&](double lambda) {
      double num = 0.0, den = 0.0;
      for (int i = 0; i < 7; ++i) {
        double w = d.p[i] * std::exp(lambda * (i + 1));
        num += w * (i + 1);
        den += w;
      }
      return num / den;
    };
    double lo = -8.0, hi = 8.0;
    if (tilted_mean(lo) > mean || tilted_mean(hi) < mean) {
      // Target mean unreachable by tilting (fully degenerate tails);
      // fall back to the untilted discretization.
      return d;
    }
    for (int iter = 0; iter < 200; ++iter) {
      double mid = 0.5 * (lo + hi);
      if (tilted_mean(mid) < mean) lo = mid;
      else hi = mid;
    }
    double lambda = 0.5 * (lo + hi);
    double sum2 = 0.0;
    for (int i = 0; i < 7; ++i) {
      d.p[i] *= std::exp(lambda * (i + 1));
      sum2 += d.p[i];
    }
    for (double& v : d.p) v /= sum2;
    return d;
  }

  int sample(Rng& rng) const {
    double u = rng.uniform01();
    double acc = 0.0;
    for (int i = 0; i < 7; ++i) {
      acc += p[i];
      if (u < acc) return i + 1;
    }
    return 7;
  }

  double mean() const {
    double m = 0.0;
    for (int i = 0; i < 7; ++i) m += p[i] * (i + 1);
    return m;
  }

  double sd() const {
    double m = mean(), v = 0.0;
    for (int i = 0; i < 7; ++i) v += p[i] * (i + 1 - m) * (i + 1 - m);
    return std::sqrt(v);
  }
};

const char* kReasonByOutcome[4][3] = {
    {"the experience fell badly short of what I expected",
     "service this poor is hard to excuse",
     "almost everything about this delivery went wrong"},
    {"the delivery was below what I would consider acceptable",
     "several things went worse than expected",
     "the experience left clear room for improvement"},
    {"the delivery went about the way I expected",
     "nothing stood out but nothing went wrong",
     "a normal, acceptable delivery"},
    {"the experience was better than I expected",
     "everything about this delivery went smoothly",
     "service like this deserves recognition"}};

void validate_cell(const SyntheticCell& cell) {
  double total = cell.p_keep + cell.p_remove + cell.p_adjust;
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument("synthetic cell: decision probabilities must sum to 1");
  if (cell.p_keep < 0 || cell.p_remove < 0 || cell.p_adjust < 0)
    throw std::invalid_argument("synthetic cell: negative decision probability");
  if (cell.customer_sat_sd < 0 || cell.worker_sat_sd < 0 || cell.adjust_sd < 0)
    throw std::invalid_argument("synthetic cell: negative sd");
}

}  // namespace

SyntheticProfile SyntheticProfile::uniform(const SyntheticCell& cell) {
  validate_cell(cell);
  SyntheticProfile profile;
  for (const auto& c : enumerate_conditions())
    profile.cells_[c.canonical_index()] = cell;
  return profile;
}

void SyntheticProfile::set_cell(const ExperimentCondition& condition,
                                const SyntheticCell& cell) {
  validate_cell(cell);
  cells_[condition.canonical_index()] = cell;
}

const SyntheticCell& SyntheticProfile::cell(const ExperimentCondition& condition) const {
  auto it = cells_.find(condition.canonical_index());
  if (it == cells_.end())
    throw Error("synthetic profile does not cover condition " + condition.key());
  return it->second;
}

SyntheticProfile::ImpliedMoments SyntheticProfile::implied_satisfaction(
    const ExperimentCondition& condition, Role role) const {
  const SyntheticCell& c = cell(condition);
  auto d = role == Role::customer
               ? DiscreteLikert::build(c.customer_sat_mean, c.customer_sat_sd)
               : DiscreteLikert::build(c.worker_sat_mean, c.worker_sat_sd);
  return {d.mean(), d.sd()};
}

SyntheticProfile SyntheticProfile::load(const std::string& path) {
  return from_json(csv::read_file(path));
}

SyntheticProfile SyntheticProfile::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("synthetic profile parse error: ") + e.what());
  }
  SyntheticProfile profile;
  for (const auto& entry : j.at("cells")) {
    ExperimentCondition c =
        ExperimentCondition::from_key(entry.at("condition").get<std::string>());
    SyntheticCell cell;
    cell.customer_sat_mean = entry.at("customer_sat_mean").get<double>();
    cell.customer_sat_sd = entry.at("customer_sat_sd").get<double>();
    cell.worker_sat_mean = entry.at("worker_sat_mean").get<double>();
    cell.worker_sat_sd = entry.at("worker_sat_sd").get<double>();
    cell.p_keep = entry.at("p_keep").get<double>();
    cell.p_remove = entry.at("p_remove").get<double>();
    cell.p_adjust = entry.at("p_adjust").get<double>();
    cell.adjust_mean = entry.at("adjust_mean").get<double>();
    cell.adjust_sd = entry.at("adjust_sd").get<double>();
    profile.set_cell(c, cell);
  }
  return profile;
}

std::string SyntheticProfile::to_json() const {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : enumerate_conditions()) {
    auto it = cells_.find(c.canonical_index());
    if (it == cells_.end()) continue;
    const SyntheticCell& cell = it->second;
    cells.push_back({{"condition", c.key()},
                     {"customer_sat_mean", cell.customer_sat_mean},
                     {"customer_sat_sd", cell.customer_sat_sd},
                     {"worker_sat_mean", cell.worker_sat_mean},
                     {"worker_sat_sd", cell.worker_sat_sd},
                     {"p_keep", cell.p_keep},
                     {"p_remove", cell.p_remove},
                     {"p_adjust", cell.p_adjust},
                     {"adjust_mean", cell.adjust_mean},
                     {"adjust_sd", cell.adjust_sd}});
  }
  return nlohmann::json{{"cells", cells}}.dump(2) + "\n";
}

RawResponse synthetic_respond(const SyntheticProfile& profile,
                              const PromptBundle& bundle, uint64_t seed) {
  const SyntheticCell& cell = profile.cell(bundle.condition);
  Rng rng(seed);

  std::string text;
  const bool customer = bundle.role == Role::customer;
  auto likert = customer
                    ? DiscreteLikert::build(cell.customer_sat_mean, cell.customer_sat_sd)
                    : DiscreteLikert::build(cell.worker_sat_mean, cell.worker_sat_sd);

  if (customer && bundle.condition.tip_adjustable) {
    double u = rng.uniform01();
    if (u < cell.p_keep) {
      text += "TIP DECISION: keep\n";
    } else if (u < cell.p_keep + cell.p_remove) {
      text += "TIP DECISION: remove\n";
    } else {
      double amount = -1.0;
      for (int tries = 0; tries < 100 && amount < 0.0; ++tries)
        amount = rng.normal(cell.adjust_mean, cell.adjust_sd);
      if (amount < 0.0) amount = 0.0;
      text += "TIP DECISION: adjust\n";
      text += "NEW TIP AMOUNT: " + Money::from_dollars(amount).str_with_symbol() + "\n";
    }
  }

  int rating = likert.sample(rng);
  int outcome = static_cast<int>(bundle.condition.service_outcome);
  const char* reason = kReasonByOutcome[outcome][rng.uniform_below(3)];
  text += "SATISFACTION: " + std::to_string(rating) + "\n";
  text += "REASONING: ";
  text += customer ? "As the customer, " : "As the driver, ";
  text += reason;
  text += ".\n";

  RawResponse response;
  response.text = std::move(text);
  response.attempts = 1;
  response.provider_metadata["provider"] = "synthetic";
  return response;
}

// --- dyad execution ---------------------------------------------------------

namespace {

// One agent interaction with a shared budget over transport retries and
// parse re-prompts.
template <typename ParseFn>
auto call_and_parse(ChatProvider& provider, const AgentParams& params,
                    const PromptBundle& bundle, uint64_t call_seed_base,
                    const std::string& reminder, ParseFn&& parse_fn,
                    const std::function<void(std::chrono::milliseconds)>& sleep_fn,
                    RawResponse& raw_out, int& attempts_out) {
  auto sleep = sleep_fn ? sleep_fn : [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
  PromptBundle current = bundle;
  std::string last_error;
  for (int attempt = 1; attempt <= params.max_retries + 1; ++attempt) {
    attempts_out = attempt;
    try {
      RawResponse raw;
      raw.text = provider.complete(current, params,
                                   derive_seed(call_seed_base, "attempt",
                                               static_cast<uint64_t>(attempt)));
      raw.attempts = attempt;
      raw.provider_metadata["provider"] = provider.id();
      raw_out = raw;
      return parse_fn(raw);
    } catch (const TransportError& e) {
      last_error = e.what();
      if (!e.retryable() || attempt > params.max_retries) throw;
      sleep(params.backoff_base * (1LL << (attempt - 1)));
    } catch (const ParseError& e) {
      last_error = e.what();
      if (attempt > params.max_retries) throw;
      // Same prompt, plus a format reminder; no backoff needed.
      if (current.response_format_spec == bundle.response_format_spec)
        current.response_format_spec += "\n\n" + reminder;
    }
  }
  throw Error("retry budget exhausted: " + last_error);
}

nlohmann::json customer_result_json(const CustomerResult& r) {
  nlohmann::json j = {{"satisfaction", r.satisfaction},
                      {"reasoning", r.reasoning},
                      {"final_tip", r.final_tip.str()}};
  if (r.tip_decision) j["tip_decision"] = to_string(*r.tip_decision);
  return j;
}

}  // namespace

DyadOutcome run_dyad(const ExperimentCondition& condition, uint64_t replicate_seed,
                     ChatProvider& customer_agent, ChatProvider& worker_agent,
                     const VignetteLibrary& library, Money price, Money initial_tip,
                     const AgentParams& params, const std::string& group_id,
                     const std::string& run_id, int replicate,
                     const std::string& reprompt_reminder,
                     const AgentCallSink& sink,
                     const std::function<void(std::chrono::milliseconds)>& sleep_fn) {
  params.validate();
  const std::string dyad_id =
      group_id + "/" + condition.key() + "/r" + std::to_string(replicate);

  DyadOutcome outcome;
  AgentCallLog log;
  log.role = Role::customer;
  log.started_at = iso_timestamp_now();

  // Customer leg.
  PromptBundle customer_bundle = build_customer_prompt(library, condition, price, initial_tip);
  log.prompt_hash = std::to_string(hash64(customer_bundle.full_text()));
  uint64_t customer_seed = derive_seed(replicate_seed, "customer", 0);
  log.seed = customer_seed;

  CustomerResult customer;
  RawResponse customer_raw;
  try {
    customer = call_and_parse(
        customer_agent, params, customer_bundle, customer_seed, reprompt_reminder,
        [&](const RawResponse& raw) {
          return parse_customer_response(raw, condition, initial_tip);
        },
        sleep_fn, customer_raw, log.attempts);
    log.raw_text = customer_raw.text;
    log.parsed_json = customer_result_json(customer).dump();
  } catch (const std::exception& e) {
    log.raw_text = customer_raw.text;
    log.error = e.what();
    log.finished_at = iso_timestamp_now();
    if (sink) sink(log);
    outcome.failure = std::string("customer leg failed: ") + e.what();
    return outcome;
  }
  log.finished_at = iso_timestamp_now();
  if (sink) sink(log);

  // Worker leg, strictly after the customer parse (the worker prompt
  // embeds the customer's final tip).
  AgentCallLog wlog;
  wlog.role = Role::worker;
  wlog.started_at = iso_timestamp_now();
  PromptBundle worker_bundle =
      build_worker_prompt(library, condition, customer, initial_tip);
  wlog.prompt_hash = std::to_string(hash64(worker_bundle.full_text()));
  uint64_t worker_seed = derive_seed(replicate_seed, "worker", 0);
  wlog.seed = worker_seed;

  WorkerResult worker;
  RawResponse worker_raw;
  try {
    worker = call_and_parse(
        worker_agent, params, worker_bundle, worker_seed, reprompt_reminder,
        [&](const RawResponse& raw) { return parse_worker_response(raw); },
        sleep_fn, worker_raw, wlog.attempts);
    wlog.raw_text = worker_raw.text;
    wlog.parsed_json = nlohmann::json{{"satisfaction", worker.satisfaction},
                                      {"reasoning", worker.reasoning}}
                           .dump();
  } catch (const std::exception& e) {
    wlog.raw_text = worker_raw.text;
    wlog.error = e.what();
    wlog.finished_at = iso_timestamp_now();
    if (sink) sink(wlog);
    outcome.failure = std::string("worker leg failed: ") + e.what();
    return outcome;
  }
  wlog.finished_at = iso_timestamp_now();
  if (sink) sink(wlog);

  DyadRecord record;
  record.run_id = run_id;
  record.group_id = group_id;
  record.dyad_id = dyad_id;
  record.condition = condition;
  record.replicate = replicate;
  record.price = price;
  record.initial_tip = initial_tip;
  record.customer = customer;
  record.worker = worker;
  record.started_at = log.started_at;
  record.finished_at = wlog.finished_at;
  outcome.record = std::move(record);
  return outcome;
}

}  // namespace gabm
