#pragma once

// Executes a configured strategy over the sampled evaluation set, appending one
// record per question to <output_dir>/records.jsonl.

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcourt/cli/run_config.hpp"
#include "rcourt/run_record.hpp"

namespace rcourt::cli {

inline constexpr std::string_view kRecordsFile = "records.jsonl";
inline constexpr std::string_view kManifestFile = "manifest.json";

struct RunOptions {
  // Stop scheduling after this many questions (simulates an interruption).
  std::optional<std::size_t> stop_after;
  // Test seams: replace the configured backend or corpus.
  std::shared_ptr<CompletionBackend> backend;
  std::shared_ptr<const Corpus> corpus;
};

struct RunSummary {
  std::filesystem::path dir;
  std::size_t total = 0;     // questions in the evaluation set
  std::size_t skipped = 0;   // already recorded before this invocation
  std::size_t executed = 0;  // recorded by this invocation
  std::size_t failed = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
};

// The evaluation set a config selects: seeded sample, then the first_n prefix.
std::vector<TaskSpec> evaluation_set(const RunConfig& config);

nlohmann::json make_manifest(const RunConfig& config, const std::vector<TaskSpec>& items);

// Reads the record log, dropping an incomplete trailing line left by a crash
// (the file is truncated to the last complete record). Throws RecordError for
// corruption anywhere else.
std::vector<RunRecord> recover_records(const std::filesystem::path& path);

// Runs one configuration. With runs > 1 each run goes to <output_dir>/run-<i>
// and one summary per run is returned.
std::vector<RunSummary> cmd_run(const RunConfig& config, const RunOptions& options = {});

RunSummary run_single(const RunConfig& config, const RunOptions& options);

}  // namespace rcourt::cli
