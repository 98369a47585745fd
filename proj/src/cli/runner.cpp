#include "rcourt/cli/runner.hpp"

#include "rcourt/digest.hpp"
#include "rcourt/errors.hpp"
#include "rcourt/evalkit.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef RCOURT_VERSION
#define RCOURT_VERSION "0.0.0"
#endif
#ifndef RCOURT_GIT_REV
#define RCOURT_GIT_REV "unknown"
#endif

namespace rcourt::cli {

namespace {

namespace fs = std::filesystem;

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json_file(const fs::path& path, const nlohmann::json& doc) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << doc.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

std::shared_ptr<const Corpus> build_corpus(const RunConfig& config) {
  if (!uses_retrieval(config.strategy.name) || config.dataset == Dataset::MuSiQue) return nullptr;
  if (config.retrieval.backend == "wikipedia") {
    auto limiter = std::make_shared<RateLimiter>(config.retrieval.rate_limit_rpm, 5.0);
    return std::make_shared<WikipediaCorpus>(config.retrieval.wikipedia, std::move(limiter));
  }
  return LocalCorpus::from_file(config.retrieval.corpus_path);
}

std::shared_ptr<CompletionBackend> build_backend(const RunConfig& config) {
  if (config.llm.backend == "scripted") return ScriptedBackend::from_file(config.llm.script_path);
  auto limiter = std::make_shared<RateLimiter>(config.llm.rate_limit_rpm, config.llm.rate_limit_burst);
  return std::make_shared<RemoteBackend>(config.llm.remote, std::move(limiter));
}

RunRecord make_record(const TaskSpec& task, const RunConfig& config) {
  RunRecord r;
  r.task_id = task.id;
  r.dataset = task.dataset;
  r.strategy = std::string(to_string(config.strategy.name));
  r.question = task.question;
  r.gold = task.gold;
  r.run_index = config.run_index;
  return r;
}

RunRecord execute_question(const TaskSpec& task, const RunConfig& config, const StrategyContext& ctx) {
  auto record = make_record(task, config);
  try {
    auto outcome = run_strategy(task, config.strategy, ctx);
    record.candidates = outcome.candidates;
    record.verdict = outcome.verdict;
    record.final_answer = outcome.final_answer;
    record.fallback = outcome.fallback;
    record.extras = outcome_extras(outcome);
    record.ledger = outcome.ledger;
    record.em = exact_match(record.final_answer, record.gold);
    record.f1 = f1_score(record.final_answer, record.gold);
  } catch (const std::exception& e) {
    spdlog::error("question {} failed: {}", task.id, e.what());
    record.error = e.what();
  }
  return record;
}

}  // namespace

std::vector<TaskSpec> evaluation_set(const RunConfig& config) {
  auto items = load_dataset(config.dataset, config.dataset_path);
  auto sample = sample_eval_set<TaskSpec>(items, config.n_questions, config.seed);
  if (config.first_n) sample.resize(*config.first_n);
  return sample;
}

nlohmann::json make_manifest(const RunConfig& config, const std::vector<TaskSpec>& items) {
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& t : items) ids.push_back(t.id);
  nlohmann::json prompts = nlohmann::json::object();
  auto catalog = catalog_for(config);
  for (const auto& name : catalog.names()) prompts[name] = sha256_hex(catalog.raw(name));
  return {{"config", resolved_config(config)},
          {"config_digest", config_digest(config)},
          {"version", RCOURT_VERSION},
          {"git_rev", RCOURT_GIT_REV},
          {"created_at", utc_timestamp()},
          {"sampler", {{"id", kSamplerId}, {"seed", config.seed}}},
          {"normalizer", kNormalizerId},
          {"ledger_mode", to_string(ledger_mode(config.cache.mode))},
          {"prompt_digests", prompts},
          {"eval_ids", ids}};
}

std::vector<RunRecord> recover_records(const fs::path& path) {
  std::vector<RunRecord> records;
  if (!fs::exists(path)) return records;
  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::size_t good_end = 0;
  while (pos < text.size()) {
    ++line_no;
    auto nl = text.find('\n', pos);
    bool complete = nl != std::string::npos;
    auto line = text.substr(pos, complete ? nl - pos : std::string::npos);
    auto next = complete ? nl + 1 : text.size();
    if (trim(line).empty()) {
      pos = next;
      good_end = next;
      continue;
    }
    try {
      records.push_back(nlohmann::json::parse(line).get<RunRecord>());
      good_end = complete ? next : text.size();
    } catch (const std::exception& e) {
      if (complete) throw RecordError(line_no, e.what());
      spdlog::warn("{}: dropping incomplete trailing record on line {}", path.string(), line_no);
      break;
    }
    pos = next;
  }
  if (good_end < text.size()) {
    fs::resize_file(path, good_end);
  } else if (!text.empty() && text.back() != '\n') {
    std::ofstream(path, std::ios::app) << "\n";
  }
  return records;
}

RunSummary run_single(const RunConfig& config, const RunOptions& options) {
  auto items = evaluation_set(config);
  auto catalog = catalog_for(config);
  auto corpus = options.corpus ? options.corpus : build_corpus(config);
  auto base = options.backend ? options.backend : build_backend(config);
  std::shared_ptr<CachingBackend> caching;
  std::shared_ptr<CompletionBackend> backend = base;
  if (config.cache.mode != CacheMode::Off) {
    caching = std::make_shared<CachingBackend>(base, config.cache.dir);
    backend = caching;
  }
  LlmGateway gateway(backend, config.model_id, ledger_mode(config.cache.mode));
  StrategyContext ctx{gateway, corpus, catalog};

  RunSummary summary;
  summary.dir = config.output_dir;
  summary.total = items.size();

  fs::create_directories(config.output_dir);
  auto manifest_path = config.output_dir / kManifestFile;
  if (fs::exists(manifest_path)) {
    auto existing = read_json_file(manifest_path);
    if (existing.value("config_digest", std::string()) != config_digest(config)) {
      throw ConfigError("output directory " + config.output_dir.string() +
                        " holds a run with a different configuration");
    }
  } else {
    write_json_file(manifest_path, make_manifest(config, items));
  }

  auto records_path = config.output_dir / kRecordsFile;
  std::set<std::string> done;
  for (const auto& r : recover_records(records_path)) done.insert(r.task_id);

  std::vector<const TaskSpec*> pending;
  for (const auto& t : items) {
    if (done.count(t.id)) {
      ++summary.skipped;
    } else {
      pending.push_back(&t);
    }
  }
  if (options.stop_after && pending.size() > *options.stop_after) pending.resize(*options.stop_after);
  if (summary.skipped > 0) {
    spdlog::info("resuming {}: {} of {} questions already recorded", config.output_dir.string(),
                 summary.skipped, summary.total);
  }

  std::ofstream log(records_path, std::ios::binary | std::ios::app);
  if (!log) throw std::runtime_error("cannot open " + records_path.string());

  // Results are appended in evaluation order: finished questions wait in
  // `ready` until every earlier question has been written.
  std::mutex mutex;
  std::map<std::size_t, RunRecord> ready;
  std::size_t next_to_write = 0;
  std::atomic<std::size_t> next_task{0};
  std::exception_ptr write_error;

  auto worker = [&] {
    for (;;) {
      auto i = next_task.fetch_add(1);
      if (i >= pending.size()) return;
      auto record = execute_question(*pending[i], config, ctx);
      std::lock_guard lock(mutex);
      ready.emplace(i, std::move(record));
      while (!ready.empty() && ready.begin()->first == next_to_write) {
        auto& r = ready.begin()->second;
        log << nlohmann::json(r).dump() << "\n";
        log.flush();
        if (!log && !write_error) {
          write_error = std::make_exception_ptr(std::runtime_error("write failed: " + records_path.string()));
        }
        ++summary.executed;
        if (r.failed()) ++summary.failed;
        spdlog::info("[{}/{}] {} em={} calls={}", summary.skipped + summary.executed, summary.total,
                     r.task_id, r.em, r.ledger.llm_calls);
        ready.erase(ready.begin());
        ++next_to_write;
      }
    }
  };

  auto threads = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), pending.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (write_error) std::rethrow_exception(write_error);

  if (caching) {
    summary.cache_hits = caching->hits();
    summary.cache_misses = caching->misses();
  }
  return summary;
}

std::vector<RunSummary> cmd_run(const RunConfig& config, const RunOptions& options) {
  std::vector<RunConfig> runs;
  if (config.runs == 1) {
    runs.push_back(config);
  } else {
    for (int i = 1; i <= config.runs; ++i) {
      auto c = config;
      c.runs = 1;
      c.run_index = i - 1;
      c.strategy.sample_offset = config.strategy.sample_offset + (i - 1) * 1000;
      c.output_dir = config.output_dir / ("run-" + std::to_string(i));
      runs.push_back(std::move(c));
    }
  }
  for (const auto& c : runs) {
    validate_run_config(c);
    // An unreadable dataset or a too-small pool is a configuration problem.
    try {
      evaluation_set(c);
    } catch (const DatasetError& e) {
      throw ConfigError(e.what());
    } catch (const InsufficientItems& e) {
      throw ConfigError(e.what());
    }
  }

  std::vector<RunSummary> summaries;
  for (const auto& c : runs) summaries.push_back(run_single(c, options));
  return summaries;
}

}  // namespace rcourt::cli
