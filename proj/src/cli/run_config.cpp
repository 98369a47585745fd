#include "rcourt/cli/run_config.hpp"

#include "rcourt/digest.hpp"
#include "rcourt/errors.hpp"
#include "rcourt/http.hpp"

#include <fstream>
#include <set>

namespace rcourt::cli {

namespace {

namespace fs = std::filesystem;

void check_keys(const nlohmann::json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const nlohmann::json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& value) {
  if (value.empty()) return {};
  fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

CacheMode cache_mode_from_string(const std::string& s) {
  if (s == "off") return CacheMode::Off;
  if (s == "replay") return CacheMode::Replay;
  if (s == "accounting") return CacheMode::Accounting;
  throw ConfigError("cache.mode must be off, replay or accounting");
}

void parse_llm(const nlohmann::json& j, const fs::path& base, LlmSettings& llm) {
  check_keys(j, "llm",
             {"backend", "script_path", "base_url", "path", "auth_header", "auth_prefix", "api_key_env",
              "request_template", "response_text_pointer", "timeout_seconds", "max_attempts",
              "initial_backoff_ms", "rate_limit_rpm", "rate_limit_burst"});
  auto& r = llm.remote;
  if (j.contains("backend")) llm.backend = get<std::string>(j, "backend", "llm");
  if (j.contains("script_path")) llm.script_path = resolve(base, get<std::string>(j, "script_path", "llm"));
  if (j.contains("base_url")) r.base_url = get<std::string>(j, "base_url", "llm");
  if (j.contains("path")) r.path = get<std::string>(j, "path", "llm");
  if (j.contains("auth_header")) r.auth_header = get<std::string>(j, "auth_header", "llm");
  if (j.contains("auth_prefix")) r.auth_prefix = get<std::string>(j, "auth_prefix", "llm");
  if (j.contains("api_key_env")) r.api_key_env = get<std::string>(j, "api_key_env", "llm");
  if (j.contains("request_template")) r.request_template = j.at("request_template");
  if (j.contains("response_text_pointer")) {
    r.response_text_pointer = get<std::string>(j, "response_text_pointer", "llm");
  }
  if (j.contains("timeout_seconds")) r.timeout_seconds = get<double>(j, "timeout_seconds", "llm");
  if (j.contains("max_attempts")) r.max_attempts = get<int>(j, "max_attempts", "llm");
  if (j.contains("initial_backoff_ms")) {
    r.initial_backoff = std::chrono::milliseconds(get<long>(j, "initial_backoff_ms", "llm"));
  }
  if (j.contains("rate_limit_rpm")) llm.rate_limit_rpm = get<double>(j, "rate_limit_rpm", "llm");
  if (j.contains("rate_limit_burst")) llm.rate_limit_burst = get<double>(j, "rate_limit_burst", "llm");
}

void parse_retrieval(const nlohmann::json& j, const fs::path& base, RetrievalSettings& ret) {
  check_keys(j, "retrieval",
             {"backend", "corpus_path", "api_url", "cache_dir", "timeout_seconds", "rate_limit_rpm"});
  if (j.contains("backend")) ret.backend = get<std::string>(j, "backend", "retrieval");
  if (j.contains("corpus_path")) {
    ret.corpus_path = resolve(base, get<std::string>(j, "corpus_path", "retrieval"));
  }
  if (j.contains("api_url")) ret.wikipedia.api_url = get<std::string>(j, "api_url", "retrieval");
  if (j.contains("cache_dir")) {
    ret.wikipedia.cache_dir = resolve(base, get<std::string>(j, "cache_dir", "retrieval"));
  }
  if (j.contains("timeout_seconds")) {
    ret.wikipedia.timeout_seconds = get<double>(j, "timeout_seconds", "retrieval");
  }
  if (j.contains("rate_limit_rpm")) ret.rate_limit_rpm = get<double>(j, "rate_limit_rpm", "retrieval");
}

}  // namespace

std::string_view to_string(CacheMode mode) {
  switch (mode) {
    case CacheMode::Off: return "off";
    case CacheMode::Replay: return "replay";
    case CacheMode::Accounting: return "accounting";
  }
  return "unknown";
}

LedgerMode ledger_mode(CacheMode mode) {
  return mode == CacheMode::Accounting ? LedgerMode::Accounting : LedgerMode::Replay;
}

RunConfig parse_run_config(const nlohmann::json& doc, const fs::path& base_dir) {
  check_keys(doc, "config",
             {"dataset", "dataset_path", "n_questions", "first_n", "seed", "strategy", "strategy_params",
              "model_id", "llm", "cache", "retrieval", "prompts", "parallelism", "runs", "run_index",
              "output_dir"});
  RunConfig c;
  try {
    c.dataset = dataset_from_string(get<std::string>(doc, "dataset", "config"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.dataset_path = resolve(base_dir, get<std::string>(doc, "dataset_path", "config"));
  if (doc.contains("n_questions")) c.n_questions = get<std::size_t>(doc, "n_questions", "config");
  if (doc.contains("first_n") && !doc["first_n"].is_null()) {
    c.first_n = get<std::size_t>(doc, "first_n", "config");
  }
  if (doc.contains("seed")) c.seed = get<std::uint64_t>(doc, "seed", "config");
  if (doc.contains("model_id")) c.model_id = get<std::string>(doc, "model_id", "config");
  if (doc.contains("parallelism")) c.parallelism = get<int>(doc, "parallelism", "config");
  if (doc.contains("runs")) c.runs = get<int>(doc, "runs", "config");
  if (doc.contains("run_index")) c.run_index = get<int>(doc, "run_index", "config");
  if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, get<std::string>(doc, "output_dir", "config"));

  auto params = doc.value("strategy_params", nlohmann::json::object());
  if (doc.contains("prompts")) {
    const auto& p = doc["prompts"];
    check_keys(p, "prompts", {"dir", "react", "react_template", "standard_concise"});
    if (p.contains("dir") && !p["dir"].is_null()) c.prompt_dir = resolve(base_dir, get<std::string>(p, "dir", "prompts"));
    // Prompt choices feed the strategy; explicit strategy_params win.
    for (const auto& key : {"react_template", "standard_concise"}) {
      if (p.contains(key) && !p[key].is_null() && !params.contains(key)) params[key] = p[key];
    }
    if (p.contains("react") && !p["react"].is_null() && !params.contains("react_prompt")) {
      params["react_prompt"] = p["react"];
    }
  }
  c.strategy = strategy_spec_from_json(strategy_from_string(get<std::string>(doc, "strategy", "config")),
                                       params);
  if (c.run_index > 0 && c.strategy.sample_offset == 0) c.strategy.sample_offset = c.run_index * 1000;

  if (doc.contains("llm")) parse_llm(doc["llm"], base_dir, c.llm);
  if (doc.contains("cache")) {
    const auto& cache = doc["cache"];
    check_keys(cache, "cache", {"dir", "mode"});
    if (cache.contains("dir")) c.cache.dir = resolve(base_dir, get<std::string>(cache, "dir", "cache"));
    if (cache.contains("mode")) c.cache.mode = cache_mode_from_string(get<std::string>(cache, "mode", "cache"));
  }
  if (doc.contains("retrieval")) parse_retrieval(doc["retrieval"], base_dir, c.retrieval);
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc, fs::absolute(path).parent_path());
}

nlohmann::json resolved_config(const RunConfig& c) {
  const auto& r = c.llm.remote;
  nlohmann::json j = {
      {"dataset", to_string(c.dataset)},
      {"dataset_path", c.dataset_path.string()},
      {"n_questions", c.n_questions},
      {"first_n", c.first_n ? nlohmann::json(*c.first_n) : nlohmann::json(nullptr)},
      {"seed", c.seed},
      {"strategy", to_string(c.strategy.name)},
      {"strategy_params", strategy_spec_to_json(c.strategy)},
      {"model_id", c.model_id},
      {"llm",
       {{"backend", c.llm.backend},
        {"script_path", c.llm.script_path.string()},
        {"base_url", r.base_url},
        {"path", r.path},
        {"auth_header", r.auth_header},
        {"auth_prefix", r.auth_prefix},
        {"api_key_env", r.api_key_env},
        {"request_template", r.request_template},
        {"response_text_pointer", r.response_text_pointer},
        {"timeout_seconds", r.timeout_seconds},
        {"max_attempts", r.max_attempts},
        {"initial_backoff_ms", r.initial_backoff.count()},
        {"rate_limit_rpm", c.llm.rate_limit_rpm},
        {"rate_limit_burst", c.llm.rate_limit_burst}}},
      {"cache", {{"dir", c.cache.dir.string()}, {"mode", to_string(c.cache.mode)}}},
      {"retrieval",
       {{"backend", c.retrieval.backend},
        {"corpus_path", c.retrieval.corpus_path.string()},
        {"api_url", c.retrieval.wikipedia.api_url},
        {"cache_dir", c.retrieval.wikipedia.cache_dir.string()},
        {"timeout_seconds", c.retrieval.wikipedia.timeout_seconds},
        {"rate_limit_rpm", c.retrieval.rate_limit_rpm}}},
      {"prompts", {{"dir", c.prompt_dir.string()}}},
      {"parallelism", c.parallelism},
      {"runs", c.runs},
      {"run_index", c.run_index},
      {"output_dir", c.output_dir.string()},
  };
  return j;
}

std::string config_digest(const RunConfig& config) {
  auto j = resolved_config(config);
  j.erase("parallelism");
  j.erase("output_dir");
  return sha256_hex(j.dump());
}

void validate_run_config(const RunConfig& c) {
  if (c.dataset_path.empty()) throw ConfigError("dataset_path is required");
  if (!fs::is_regular_file(c.dataset_path)) {
    throw ConfigError("dataset file not found: " + c.dataset_path.string());
  }
  if (c.n_questions == 0) throw ConfigError("n_questions must be positive");
  if (c.first_n && (*c.first_n == 0 || *c.first_n > c.n_questions)) {
    throw ConfigError("first_n must lie in [1, n_questions]");
  }
  if (c.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (c.runs < 1) throw ConfigError("runs must be at least 1");
  if (c.run_index < 0) throw ConfigError("run_index must be non-negative");
  if (c.output_dir.empty()) throw ConfigError("output_dir is required");
  if (c.model_id.empty()) throw ConfigError("model_id is required");

  if (c.llm.backend == "scripted") {
    if (!fs::is_regular_file(c.llm.script_path)) {
      throw ConfigError("llm.script_path not found: " + c.llm.script_path.string());
    }
  } else if (c.llm.backend == "remote") {
    try {
      split_url(c.llm.remote.base_url);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("llm.base_url: ") + e.what());
    }
    if (c.llm.remote.max_attempts < 1) throw ConfigError("llm.max_attempts must be at least 1");
    if (c.llm.rate_limit_rpm <= 0) throw ConfigError("llm.rate_limit_rpm must be positive");
  } else {
    throw ConfigError("llm.backend must be remote or scripted");
  }
  if (c.cache.mode != CacheMode::Off && c.cache.dir.empty()) {
    throw ConfigError("cache.dir is required unless cache.mode is off");
  }

  bool needs_corpus = uses_retrieval(c.strategy.name) && c.dataset != Dataset::MuSiQue;
  if (c.retrieval.backend == "local") {
    if (needs_corpus && !fs::is_regular_file(c.retrieval.corpus_path)) {
      throw ConfigError("retrieval.corpus_path not found: " + c.retrieval.corpus_path.string());
    }
  } else if (c.retrieval.backend == "wikipedia") {
    try {
      split_url(c.retrieval.wikipedia.api_url);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("retrieval.api_url: ") + e.what());
    }
    if (c.retrieval.rate_limit_rpm <= 0) throw ConfigError("retrieval.rate_limit_rpm must be positive");
  } else {
    throw ConfigError("retrieval.backend must be local or wikipedia");
  }

  validate_strategy(c.strategy, c.dataset, catalog_for(c));
}

PromptCatalog catalog_for(const RunConfig& config) {
  if (config.prompt_dir.empty()) return PromptCatalog::builtin();
  return PromptCatalog::from_directory(config.prompt_dir);
}

}  // namespace rcourt::cli
