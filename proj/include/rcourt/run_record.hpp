#pragma once

// One line of a run's record log: everything known about one question under
// one strategy.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcourt/core.hpp"
#include "rcourt/judge.hpp"
#include "rcourt/llm_gateway.hpp"

namespace rcourt {

struct RunRecord {
  std::string task_id;
  Dataset dataset = Dataset::HotpotQA;
  std::string strategy;
  std::string question;
  std::vector<std::string> gold;
  std::vector<CandidateAnswer> candidates;
  std::optional<Verdict> verdict;
  std::string final_answer;
  std::optional<std::string> fallback;
  nlohmann::json extras = nlohmann::json::object();
  double em = 0.0;
  double f1 = 0.0;
  LedgerSnapshot ledger;
  std::optional<std::string> error;  // set when the question failed
  int run_index = 0;

  bool failed() const { return error.has_value(); }
};

// Timing values are kept under "timing" so that everything else in a record
// is a deterministic function of config and script.
void to_json(nlohmann::json& j, const RunRecord& record);
void from_json(const nlohmann::json& j, RunRecord& record);

// Throws RecordError with the 1-based line number of the first bad line.
std::vector<RunRecord> read_records(const std::filesystem::path& path);

}  // namespace rcourt
