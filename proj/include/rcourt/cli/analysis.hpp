#pragma once

// Offline processing of record logs: rescoring, judge-subset analysis and
// cross-run comparison reports.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcourt/evalkit.hpp"
#include "rcourt/run_record.hpp"

namespace rcourt::cli {

// A directory holding records.jsonl, or a multi-run parent whose run-<i>
// children hold one each. Children come back in run order.
std::vector<std::filesystem::path> expand_run_dirs(const std::filesystem::path& dir);

// Reads <dir>/records.jsonl and recomputes EM/F1 from final_answer and gold.
// Throws RecordError naming the first bad line.
std::vector<RunRecord> load_scored_records(const std::filesystem::path& run_dir);

// Writes metrics.json and metrics.csv into every run directory under
// `run_dir` and returns the aggregates in the same order.
std::vector<Aggregate> cmd_score(const std::filesystem::path& run_dir);

// Writes analysis.json, scenarios.csv and analysis.txt (judged subset and
// scenario buckets) into every run directory under `run_dir`.
std::vector<Aggregate> cmd_analyze(const std::filesystem::path& run_dir);

struct ReportRow {
  std::string label;  // strategy, with k for RC-k
  std::string strategy;
  Dataset dataset = Dataset::HotpotQA;
  int k = 0;  // agents for RC and RC-k, 0 otherwise
  std::size_t runs = 0;
  std::size_t n = 0;  // questions per run (first run)
  double em_mean = 0.0, em_std = 0.0;
  double f1_mean = 0.0, f1_std = 0.0;
  double mean_calls = 0.0;
  double mean_time_seconds = 0.0;
  double judged_em = 0.0;
  std::size_t judged_n = 0;
  std::vector<BucketStats> buckets;  // summed over runs
  std::vector<std::string> config_digests;
};

// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_and_std(const std::vector<double>& values);

std::vector<ReportRow> collect_report(const std::vector<std::filesystem::path>& run_dirs);

// Writes table1.csv/.txt, judged.csv, scenarios.csv, efficiency.csv,
// diversity.csv, one diversity_<dataset>.svg per dataset with RC/RC-k rows,
// and report.json with the manifest digests behind every row.
std::vector<ReportRow> cmd_report(const std::vector<std::filesystem::path>& run_dirs,
                                  const std::filesystem::path& out_dir);

}  // namespace rcourt::cli
