#pragma once

// Declarative run configuration (one JSON file) and its validation.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "rcourt/core.hpp"
#include "rcourt/llm_gateway.hpp"
#include "rcourt/prompts.hpp"
#include "rcourt/retrieval_env.hpp"
#include "rcourt/strategies.hpp"

namespace rcourt::cli {

enum class CacheMode { Off, Replay, Accounting };

struct LlmSettings {
  std::string backend = "remote";  // remote | scripted
  std::filesystem::path script_path;
  RemoteConfig remote;
  double rate_limit_rpm = 500.0;
  double rate_limit_burst = 10.0;
};

struct CacheSettings {
  std::filesystem::path dir;
  CacheMode mode = CacheMode::Replay;
};

struct RetrievalSettings {
  std::string backend = "local";  // local | wikipedia
  std::filesystem::path corpus_path;
  WikipediaConfig wikipedia;
  double rate_limit_rpm = 200.0;
};

struct RunConfig {
  Dataset dataset = Dataset::HotpotQA;
  std::filesystem::path dataset_path;
  std::size_t n_questions = 500;
  std::optional<std::size_t> first_n;
  std::uint64_t seed = 0;
  StrategySpec strategy;
  std::string model_id = "gpt-4o-mini";
  LlmSettings llm;
  CacheSettings cache;
  RetrievalSettings retrieval;
  std::filesystem::path prompt_dir;
  int parallelism = 4;
  int runs = 1;
  int run_index = 0;
  std::filesystem::path output_dir;
};

std::string_view to_string(CacheMode mode);
LedgerMode ledger_mode(CacheMode mode);

// Relative paths are resolved against `base_dir`. Unknown keys raise
// ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Fully resolved configuration, every default made explicit.
nlohmann::json resolved_config(const RunConfig& config);

// SHA-256 over the resolved configuration minus settings that cannot change
// results (parallelism, output directory).
std::string config_digest(const RunConfig& config);

// Everything that can be checked without touching the network or the output
// directory. Throws ConfigError.
void validate_run_config(const RunConfig& config);

PromptCatalog catalog_for(const RunConfig& config);

}  // namespace rcourt::cli
