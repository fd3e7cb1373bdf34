#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "structcode/codec.hpp"
#include "structcode/graph.hpp"
#include "structcode/llm_client.hpp"
#include "structcode/prompt.hpp"

namespace structcode {

enum class Selection { Random, Retrieval };

const char* to_string(Selection selection);
Selection parse_selection(std::string_view name);

struct RunConfig {
  TaskKind task = TaskKind::ScriptGen;
  CodeFormat format = CodeFormat::ScriptTree;
  std::size_t k = 15;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  Selection selection = Selection::Random;
  std::size_t budget_tokens = 4096;
  std::string backend = "oracle";  // oracle | canned:<path> | remote:<url>
  std::string train_path;
  std::string test_path;
  std::string index_path;  // required for Retrieval
  std::string out_dir;
  CompletionConfig completion;
};

// Throws Error(InvalidArgument) with the offending field.
void validate_run_config(const RunConfig& config);

enum class ParseStatus { Ok, Warnings, Failed };

const char* to_string(ParseStatus status);
ParseStatus parse_status(std::string_view name);

struct PredictionRecord {
  std::string instance_id;
  std::uint64_t seed = 0;
  std::string prompt_hash;  // empty when the prompt could not be assembled
  std::string completion;
  ParseStatus status = ParseStatus::Failed;
  std::size_t warning_count = 0;
  std::string message;  // failure reason, or the first warning
  std::optional<Structure> decoded;
  std::map<std::string, double> metrics;

  bool operator==(const PredictionRecord&) const = default;
};

// One JSON object per record, keys sorted, no trailing newline.
std::string record_to_json(const PredictionRecord& record);
PredictionRecord record_from_json(std::string_view text);
void write_predictions(const std::string& path, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> read_predictions(const std::string& path);

// The model's visible continuation: stub + completion, cut after the closing
// "}" (DOT) or "]" (edge list), or at the next top-level class/def (code).
std::string truncate_completion(const SourceText& stub, std::string_view completion);

// Per-instance metrics against gold. A null prediction scores as empty.
std::map<std::string, double> score_prediction(const TaskInstance& gold, const Structure* predicted);

// Gold encodings by instance id, the input an OracleBackend needs.
std::map<std::string, SourceText> oracle_encodings(const std::vector<TaskInstance>& instances, CodeFormat format);

// The in-memory core of run(): records for every (seed, test instance), seed
// major, test order within a seed. `index` must be set for Retrieval.
std::vector<PredictionRecord> run_predictions(const RunConfig& config, const std::vector<TaskInstance>& train,
                                              const std::vector<TaskInstance>& test,
                                              const CompletionBackend& backend,
                                              const RetrievalIndex* index = nullptr);

// Loads datasets (and the index), builds the backend, runs every seed and
// writes <out_dir>/predictions_seed<N>.jsonl plus manifest.json. Returns the
// prediction file paths in seed order.
std::vector<std::string> run(const RunConfig& config);

struct MetricSummary {
  double mean = 0;
  double std = 0;  // sample standard deviation over seeds, 0 for one seed
  std::vector<double> per_seed;

  bool operator==(const MetricSummary&) const = default;
};

struct EvalReport {
  std::vector<std::uint64_t> seeds;
  std::size_t instance_count = 0;
  double parse_failure_rate = 0;
  std::map<std::string, MetricSummary> metrics;

  bool operator==(const EvalReport&) const = default;
};

// One record set per seed. Throws Error(SeedMismatch) if id sets differ and
// Error(SchemaError) on a repeated id within a seed.
EvalReport evaluate(const std::vector<std::vector<PredictionRecord>>& per_seed);
EvalReport evaluate_files(const std::vector<std::string>& paths);

enum class ReportStyle { Table, Json };

std::string render_report(const EvalReport& report, ReportStyle style);
EvalReport report_from_json(std::string_view text);

}  // namespace structcode
