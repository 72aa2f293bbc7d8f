#include "gabm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "gabm/csv.hpp"
#include "gabm/errors.hpp"

namespace gabm {
namespace {

// Shortest round-trip decimal representation.
std::string num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double to_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw SchemaError("bad number for " + what + ": '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SchemaError("bad integer for " + what + ": '" + s + "'");
  return v;
}

void check_record(const DyadRecord& r, const std::string& where) {
  auto bad = [&](const std::string& field, const std::string& detail) {
    throw DataError(where + ": invalid " + field + " (" + detail + ")");
  };
  if (r.customer.satisfaction < 1 || r.customer.satisfaction > 7)
    bad("customer.satisfaction", std::to_string(r.customer.satisfaction));
  if (r.worker.satisfaction < 1 || r.worker.satisfaction > 7)
    bad("worker.satisfaction", std::to_string(r.worker.satisfaction));
  if (r.customer.final_tip < Money::from_cents(0))
    bad("final_tip", r.customer.final_tip.str());
  if (!r.condition.tip_adjustable && r.customer.final_tip != r.initial_tip)
    bad("final_tip", "non-adjustable condition must keep the initial tip");
  if (!r.condition.tip_adjustable && r.customer.tip_decision.has_value())
    bad("tip_decision", "present in a non-adjustable condition");
}

}  // namespace

OutcomeRecord derive_outcomes(const DyadRecord& record) {
  check_record(record, "dyad " + record.dyad_id);
  OutcomeRecord out;
  out.tip_change_raw =
      record.condition.tip_adjustable
          ? static_cast<double>(record.customer.final_tip.cents() -
                                record.initial_tip.cents()) /
                100.0
          : 0.0;
  out.joint_raw = (record.customer.satisfaction + record.worker.satisfaction) / 2.0;
  out.diff_raw =
      static_cast<double>(record.customer.satisfaction - record.worker.satisfaction);
  return out;
}

const char* to_string(CenteringScope scope) {
  return scope == CenteringScope::pooled_all_groups ? "pooled_all_groups"
                                                    : "per_group";
}

CenteringScope centering_scope_from_string(const std::string& s) {
  if (s == "pooled_all_groups") return CenteringScope::pooled_all_groups;
  if (s == "per_group") return CenteringScope::per_group;
  throw SchemaError("unknown centering scope: " + s);
}

DatasetManifest center_dataset(std::vector<AnalysisRow>& rows, CenteringScope scope) {
  if (rows.empty())
    throw std::invalid_argument("center_dataset: empty dataset");

  DatasetManifest manifest;
  manifest.scope = scope;

  auto key_of = [scope](const AnalysisRow& row) {
    return scope == CenteringScope::pooled_all_groups ? std::string("*")
                                                      : row.dyad.group_id;
  };

  std::map<std::string, CenteringMeans> sums;
  std::map<std::string, int> counts;
  for (const auto& row : rows) {
    auto& s = sums[key_of(row)];
    s.tip_change += row.outcome.tip_change_raw;
    s.joint += row.outcome.joint_raw;
    s.diff += row.outcome.diff_raw;
    counts[key_of(row)]++;
  }
  for (auto& [key, s] : sums) {
    s.tip_change /= counts[key];
    s.joint /= counts[key];
    s.diff /= counts[key];
    manifest.means[key] = s;
  }

  for (auto& row : rows) {
    const auto& m = manifest.means.at(key_of(row));
    row.outcome.tip_change_c = row.outcome.tip_change_raw - m.tip_change;
    row.outcome.joint_c = row.outcome.joint_raw - m.joint;
    row.outcome.diff_c = row.outcome.diff_raw - m.diff;
    manifest.counts_per_cell[row.dyad.group_id + "|" + row.dyad.condition.key()]++;
  }
  return manifest;
}

std::string DatasetManifest::to_json() const {
  nlohmann::json means_json;
  for (const auto& [key, m] : means) {
    means_json[key] = {{"tip_change", m.tip_change},
                       {"joint", m.joint},
                       {"diff", m.diff}};
  }
  nlohmann::json j = {{"centering_scope", to_string(scope)},
                      {"means", means_json},
                      {"counts_per_cell", counts_per_cell}};
  return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("manifest parse error: ") + e.what());
  }
  DatasetManifest m;
  m.scope = centering_scope_from_string(j.at("centering_scope").get<std::string>());
  for (auto it = j.at("means").begin(); it != j.at("means").end(); ++it) {
    CenteringMeans cm;
    cm.tip_change = it.value().at("tip_change").get<double>();
    cm.joint = it.value().at("joint").get<double>();
    cm.diff = it.value().at("diff").get<double>();
    m.means[it.key()] = cm;
  }
  for (auto it = j.at("counts_per_cell").begin(); it != j.at("counts_per_cell").end(); ++it)
    m.counts_per_cell[it.key()] = it.value().get<int>();
  return m;
}

namespace {

const std::vector<std::string> kDatasetHeader = {
    "run_id",        "group_id",        "dyad_id",
    "service_outcome", "tip_adjustable", "tip_visibility",
    "price",         "initial_tip",     "final_tip",
    "customer_sat",  "worker_sat",      "customer_reasoning",
    "worker_reasoning", "tip_change_raw", "joint_raw",
    "diff_raw",      "tip_change_c",    "joint_c",
    "diff_c"};

}  // namespace

void export_dataset(std::span<const AnalysisRow> rows, const std::string& path,
                    const std::string& provenance) {
  std::string out;
  if (!provenance.empty()) out += "# " + provenance + "\n";
  out += csv::join_row(kDatasetHeader);
  for (const auto& row : rows) {
    const auto& d = row.dyad;
    const auto& o = row.outcome;
    out += csv::join_row({d.run_id, d.group_id, d.dyad_id,
                          to_string(d.condition.service_outcome),
                          d.condition.tip_adjustable ? "true" : "false",
                          to_string(d.condition.tip_visibility), d.price.str(),
                          d.initial_tip.str(), d.customer.final_tip.str(),
                          std::to_string(d.customer.satisfaction),
                          std::to_string(d.worker.satisfaction),
                          d.customer.reasoning, d.worker.reasoning,
                          num(o.tip_change_raw), num(o.joint_raw), num(o.diff_raw),
                          num(o.tip_change_c), num(o.joint_c), num(o.diff_c)});
  }
  csv::write_file(path, out);
}

std::vector<AnalysisRow> load_dataset(const std::string& path) {
  auto cells = csv::parse(csv::read_file(path));
  if (cells.empty()) throw SchemaError("empty dataset file: " + path);
  if (cells[0] != kDatasetHeader)
    throw SchemaError("dataset schema mismatch in " + path +
                      " (expected v1 column layout)");
  std::vector<AnalysisRow> rows;
  rows.reserve(cells.size() - 1);
  for (size_t i = 1; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const std::string where = path + " row " + std::to_string(i);
    if (c.size() != kDatasetHeader.size())
      throw SchemaError(where + ": wrong field count");
    AnalysisRow row;
    auto& d = row.dyad;
    d.run_id = c[0];
    d.group_id = c[1];
    d.dyad_id = c[2];
    d.condition.service_outcome = service_outcome_from_string(c[3]);
    if (c[4] == "true") {
      d.condition.tip_adjustable = true;
    } else if (c[4] == "false") {
      d.condition.tip_adjustable = false;
    } else {
      throw SchemaError(where + ": bad tip_adjustable '" + c[4] + "'");
    }
    d.condition.tip_visibility = tip_visibility_from_string(c[5]);
    d.price = Money::parse(c[6]);
    d.initial_tip = Money::parse(c[7]);
    d.customer.final_tip = Money::parse(c[8]);
    d.customer.satisfaction = to_int(c[9], "customer_sat");
    d.worker.satisfaction = to_int(c[10], "worker_sat");
    d.customer.reasoning = c[11];
    d.worker.reasoning = c[12];
    row.outcome.tip_change_raw = to_double(c[13], "tip_change_raw");
    row.outcome.joint_raw = to_double(c[14], "joint_raw");
    row.outcome.diff_raw = to_double(c[15], "diff_raw");
    row.outcome.tip_change_c = to_double(c[16], "tip_change_c");
    row.outcome.joint_c = to_double(c[17], "joint_c");
    row.outcome.diff_c = to_double(c[18], "diff_c");

    // Replicate index is carried in dyad_id (".../rN"); recover it so
    // reloaded records stay plan-addressable.
    auto slash = d.dyad_id.rfind("/r");
    if (slash != std::string::npos)
      d.replicate = to_int(d.dyad_id.substr(slash + 2), "replicate");

    try {
      OutcomeRecord expected = derive_outcomes(d);
      if (std::fabs(expected.tip_change_raw - row.outcome.tip_change_raw) > 1e-9 ||
          std::fabs(expected.joint_raw - row.outcome.joint_raw) > 1e-9 ||
          std::fabs(expected.diff_raw - row.outcome.diff_raw) > 1e-9)
        throw DataError("raw outcome columns disagree with the record");
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

QualityReport validate_quality(std::span<const DyadStatus> statuses,
                               int expected_per_cell) {
  QualityReport report;
  std::map<std::pair<std::string, int>, CellQuality> cells;
  for (const auto& s : statuses) {
    auto key = std::pair{s.group_id, s.condition.canonical_index()};
    auto& cell = cells[key];
    cell.group_id = s.group_id;
    cell.condition = s.condition;
    cell.expected = expected_per_cell;
    if (s.ok) {
      cell.usable++;
      report.total_usable++;
    } else {
      cell.failed++;
      report.total_failed++;
      report.flagged_dyads.push_back(s.dyad_id);
    }
  }
  report.cells.reserve(cells.size());
  for (auto& [key, cell] : cells) report.cells.push_back(std::move(cell));
  return report;
}

// --- journal -----------------------------------------------------------------

struct JournalWriter::Impl {
  std::ofstream out;
};

JournalWriter::JournalWriter(const std::string& path, bool append)
    : impl_(new Impl) {
  impl_->out.open(path, append ? std::ios::app : std::ios::trunc);
  if (!impl_->out) {
    delete impl_;
    throw Error("cannot open journal for writing: " + path);
  }
}

JournalWriter::~JournalWriter() { delete impl_; }

void JournalWriter::append(const JournalRecord& r) {
  nlohmann::json j = {{"run_id", r.run_id},
                      {"group_id", r.group_id},
                      {"dyad_id", r.dyad_id},
                      {"role", to_string(r.role)},
                      {"condition", r.condition.key()},
                      {"replicate", r.replicate},
                      {"seed", r.seed},
                      {"prompt_hash", r.prompt_hash},
                      {"raw_text", r.raw_text},
                      {"attempts", r.attempts},
                      {"started_at", r.started_at},
                      {"finished_at", r.finished_at}};
  if (!r.parsed_json.empty()) {
    j["parsed"] = nlohmann::json::parse(r.parsed_json);
  } else {
    j["parsed"] = nullptr;
  }
  if (!r.error.empty()) j["error"] = r.error;
  impl_->out << j.dump() << "\n";
  impl_->out.flush();
}

std::vector<JournalRecord> read_journal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open journal: " + path);
  std::vector<JournalRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(path + ":" + std::to_string(line_no) +
                        ": journal parse error: " + e.what());
    }
    JournalRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.group_id = j.at("group_id").get<std::string>();
    r.dyad_id = j.at("dyad_id").get<std::string>();
    r.role = role_from_string(j.at("role").get<std::string>());
    r.condition = ExperimentCondition::from_key(j.at("condition").get<std::string>());
    r.replicate = j.at("replicate").get<int>();
    r.seed = j.at("seed").get<uint64_t>();
    r.prompt_hash = j.at("prompt_hash").get<std::string>();
    r.raw_text = j.at("raw_text").get<std::string>();
    if (!j.at("parsed").is_null()) r.parsed_json = j.at("parsed").dump();
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    r.attempts = j.at("attempts").get<int>();
    r.started_at = j.at("started_at").get<std::string>();
    r.finished_at = j.at("finished_at").get<std::string>();
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<DyadStatus> journal_dyad_statuses(std::span<const JournalRecord> records) {
  struct Legs {
    const JournalRecord* customer = nullptr;
    const JournalRecord* worker = nullptr;
  };
  std::map<std::string, Legs> by_dyad;
  for (const auto& r : records) {
    auto& legs = by_dyad[r.dyad_id];
    // Later journal entries for a leg win (re-runs append).
    if (r.role == Role::customer) legs.customer = &r;
    else legs.worker = &r;
  }
  std::vector<DyadStatus> out;
  out.reserve(by_dyad.size());
  for (const auto& [dyad_id, legs] : by_dyad) {
    const JournalRecord* any = legs.customer ? legs.customer : legs.worker;
    DyadStatus s;
    s.group_id = any->group_id;
    s.dyad_id = dyad_id;
    s.condition = any->condition;
    s.replicate = any->replicate;
    bool customer_ok = legs.customer && legs.customer->error.empty() &&
                       !legs.customer->parsed_json.empty();
    bool worker_ok = legs.worker && legs.worker->error.empty() &&
                     !legs.worker->parsed_json.empty();
    s.ok = customer_ok && worker_ok;
    if (!s.ok) {
      if (!customer_ok)
        s.failure = legs.customer ? "customer: " + legs.customer->error
                                  : "customer leg missing";
      else
        s.failure = legs.worker ? "worker: " + legs.worker->error
                                : "worker leg missing";
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DyadRecord> journal_to_records(std::span<const JournalRecord> records,
                                           Money price, Money initial_tip) {
  std::map<std::string, std::pair<const JournalRecord*, const JournalRecord*>> by_dyad;
  for (const auto& r : records) {
    auto& legs = by_dyad[r.dyad_id];
    if (r.role == Role::customer) legs.first = &r;
    else legs.second = &r;
  }
  std::vector<DyadRecord> out;
  for (const auto& [dyad_id, legs] : by_dyad) {
    const auto* c = legs.first;
    const auto* w = legs.second;
    if (!c || !w || !c->error.empty() || !w->error.empty() ||
        c->parsed_json.empty() || w->parsed_json.empty())
      continue;  // failed dyads stay in the journal only
    nlohmann::json cj = nlohmann::json::parse(c->parsed_json);
    nlohmann::json wj = nlohmann::json::parse(w->parsed_json);
    DyadRecord record;
    record.run_id = c->run_id;
    record.group_id = c->group_id;
    record.dyad_id = dyad_id;
    record.condition = c->condition;
    record.replicate = c->replicate;
    record.price = price;
    record.initial_tip = initial_tip;
    record.customer.satisfaction = cj.at("satisfaction").get<int>();
    record.customer.reasoning = cj.at("reasoning").get<std::string>();
    record.customer.final_tip = Money::parse(cj.at("final_tip").get<std::string>());
    if (cj.contains("tip_decision"))
      record.customer.tip_decision =
          tip_decision_from_string(cj.at("tip_decision").get<std::string>());
    record.worker.satisfaction = wj.at("satisfaction").get<int>();
    record.worker.reasoning = wj.at("reasoning").get<std::string>();
    record.started_at = c->started_at;
    record.finished_at = w->finished_at;
    out.push_back(std::move(record));
  }
  return out;
}

}  // namespace gabm
