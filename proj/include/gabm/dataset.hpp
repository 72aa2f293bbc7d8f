#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gabm/agents.hpp"
#include "gabm/design.hpp"
#include "gabm/money.hpp"

namespace gabm {

// Derived outcome variables. Raw values come straight from the record;
// centered values are filled by center_dataset.
struct OutcomeRecord {
  double tip_change_raw = 0.0;  // final - initial; structurally 0 when fixed
  double joint_raw = 0.0;       // (customer + worker) / 2
  double diff_raw = 0.0;        // customer - worker
  double tip_change_c = 0.0;
  double joint_c = 0.0;
  double diff_c = 0.0;
};

struct AnalysisRow {
  DyadRecord dyad;
  OutcomeRecord outcome;
};

// Validates the record invariants and computes the raw outcome variables.
// Non-adjustable conditions force tip_change_raw to exactly 0 (structural
// zero), whatever the parsed final tip claims.
OutcomeRecord derive_outcomes(const DyadRecord& record);

enum class CenteringScope { pooled_all_groups, per_group };
const char* to_string(CenteringScope scope);
CenteringScope centering_scope_from_string(const std::string& s);

struct CenteringMeans {
  double tip_change = 0.0;
  double joint = 0.0;
  double diff = 0.0;
};

struct DatasetManifest {
  CenteringScope scope = CenteringScope::pooled_all_groups;
  // Pooled scope stores one entry under key "*"; per-group scope one per
  // group id. Raw values are recoverable as centered + mean.
  std::map<std::string, CenteringMeans> means;
  std::map<std::string, int> counts_per_cell;  // "group|condition_key" -> n

  std::string to_json() const;
  static DatasetManifest from_json(const std::string& text);
};

// Subtracts the scope mean of each raw variable; always recomputed from
// the raw columns, so centering is idempotent.
DatasetManifest center_dataset(std::vector<AnalysisRow>& rows, CenteringScope scope);

// Analysis dataset CSV, fixed column schema, RFC 4180 quoting. Loading
// re-validates every invariant and reports offending row numbers.
void export_dataset(std::span<const AnalysisRow> rows, const std::string& path,
                    const std::string& provenance = {});
std::vector<AnalysisRow> load_dataset(const std::string& path);

// Completion status of one planned dyad, for quality screening.
struct DyadStatus {
  std::string group_id;
  std::string dyad_id;
  ExperimentCondition condition;
  int replicate = 1;
  bool ok = true;
  std::string failure;
};

struct CellQuality {
  std::string group_id;
  ExperimentCondition condition;
  int expected = 0;
  int usable = 0;
  int failed = 0;
};

struct QualityReport {
  std::vector<CellQuality> cells;
  std::vector<std::string> flagged_dyads;
  int total_usable = 0;
  int total_failed = 0;

  bool complete() const { return total_failed == 0; }
};

// Whole-dyad exclusion: a dyad with either member failed is flagged and
// not usable. expected_per_cell comes from the replication plan.
QualityReport validate_quality(std::span<const DyadStatus> statuses,
                               int expected_per_cell);

// --- journal (JSONL, one object per agent call) ------------------------------

struct JournalRecord {
  std::string run_id;
  std::string group_id;
  std::string dyad_id;
  Role role = Role::customer;
  ExperimentCondition condition;
  int replicate = 1;
  uint64_t seed = 0;
  std::string prompt_hash;
  std::string raw_text;
  std::string parsed_json;  // empty when the call failed
  std::string error;        // empty on success
  int attempts = 1;
  std::string started_at;
  std::string finished_at;
};

// Append-only writer; one JSON object per line, flushed per append so a
// crash loses at most in-flight calls. Appends are serialized by the
// caller (the pipeline runs a single writer thread).
class JournalWriter {
 public:
  explicit JournalWriter(const std::string& path, bool append = false);
  ~JournalWriter();
  void append(const JournalRecord& record);

 private:
  struct Impl;
  Impl* impl_;
};

std::vector<JournalRecord> read_journal(const std::string& path);

// Reduces per-call records to per-dyad status: a dyad is ok when both its
// roles parsed successfully.
std::vector<DyadStatus> journal_dyad_statuses(std::span<const JournalRecord> records);

// Rebuilds analysis-ready dyad records from a journal, dropping failed
// dyads (they stay in the journal). price and initial_tip come from the
// run config; the journal itself stores only parsed responses.
std::vector<DyadRecord> journal_to_records(std::span<const JournalRecord> records,
                                           Money price, Money initial_tip);

}  // namespace gabm
