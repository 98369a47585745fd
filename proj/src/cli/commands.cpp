#include "rcourt/cli/commands.hpp"

#include "rcourt/cli/analysis.hpp"
#include "rcourt/cli/run_config.hpp"
#include "rcourt/cli/runner.hpp"
#include "rcourt/disk_cache.hpp"
#include "rcourt/errors.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace rcourt::cli {

namespace fs = std::filesystem;

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: " + assignment);
  }
  auto path = assignment.substr(0, eq);
  auto raw = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;
  }
  nlohmann::json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    auto dot = path.find('.', start);
    auto key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("empty key in override: " + assignment);
    if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = nlohmann::json::object();
    start = dot + 1;
  }
}

namespace {

struct RunFlags {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::string> dataset, dataset_path, strategy, model_id, output_dir;
  std::optional<std::string> cache_dir, cache_mode, llm_backend, script, corpus;
  std::optional<std::size_t> n_questions, first_n, stop_after;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism, runs;
};

nlohmann::json build_doc(const RunFlags& f, fs::path& base_dir) {
  nlohmann::json doc = nlohmann::json::object();
  base_dir = fs::current_path();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot open config file " + f.config);
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file " + f.config + " is not valid JSON: " + e.what());
    }
    base_dir = fs::absolute(f.config).parent_path();
  }
  // Paths typed on the command line are relative to the working directory.
  auto abs = [](const std::string& p) { return fs::absolute(p).string(); };
  if (f.dataset) doc["dataset"] = *f.dataset;
  if (f.dataset_path) doc["dataset_path"] = abs(*f.dataset_path);
  if (f.strategy) doc["strategy"] = *f.strategy;
  if (f.model_id) doc["model_id"] = *f.model_id;
  if (f.output_dir) doc["output_dir"] = abs(*f.output_dir);
  if (f.n_questions) doc["n_questions"] = *f.n_questions;
  if (f.first_n) doc["first_n"] = *f.first_n;
  if (f.seed) doc["seed"] = *f.seed;
  if (f.parallelism) doc["parallelism"] = *f.parallelism;
  if (f.runs) doc["runs"] = *f.runs;
  if (f.cache_dir) doc["cache"]["dir"] = abs(*f.cache_dir);
  if (f.cache_mode) doc["cache"]["mode"] = *f.cache_mode;
  if (f.llm_backend) doc["llm"]["backend"] = *f.llm_backend;
  if (f.script) doc["llm"]["script_path"] = abs(*f.script);
  if (f.corpus) doc["retrieval"]["corpus_path"] = abs(*f.corpus);
  for (const auto& s : f.sets) apply_override(doc, s);
  return doc;
}

int do_run(const RunFlags& flags) {
  fs::path base;
  auto doc = build_doc(flags, base);
  auto config = parse_run_config(doc, base);
  RunOptions options;
  options.stop_after = flags.stop_after;
  for (const auto& s : cmd_run(config, options)) {
    std::cout << fmt::format("{}: {} questions, {} skipped, {} executed, {} failed, cache {} hits / {} misses\n",
                             s.dir.string(), s.total, s.skipped, s.executed, s.failed, s.cache_hits,
                             s.cache_misses);
  }
  return kExitOk;
}

void print_metrics(const std::vector<Aggregate>& aggs) {
  for (const auto& a : aggs) {
    for (const auto& m : a.metrics) {
      std::cout << fmt::format("{} {}: n={} EM={:.1f} F1={:.1f} calls={:.2f} time={:.2f}s\n", m.strategy,
                               to_string(m.dataset), m.n, 100 * m.em_mean, 100 * m.f1_mean, m.mean_calls,
                               m.mean_time_seconds);
    }
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Multi-agent retrieval-augmented QA with trajectory-aware judging"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run a strategy over the sampled evaluation set");
  run->add_option("-c,--config", rf.config, "JSON run configuration");
  run->add_option("--set", rf.sets, "Override a config key: key.path=value");
  run->add_option("--dataset", rf.dataset, "hotpotqa | fever | musique");
  run->add_option("--dataset-path", rf.dataset_path);
  run->add_option("--strategy", rf.strategy);
  run->add_option("--model-id", rf.model_id);
  run->add_option("--output-dir", rf.output_dir);
  run->add_option("--n-questions", rf.n_questions);
  run->add_option("--first-n", rf.first_n);
  run->add_option("--seed", rf.seed);
  run->add_option("--parallelism", rf.parallelism);
  run->add_option("--runs", rf.runs);
  run->add_option("--cache-dir", rf.cache_dir);
  run->add_option("--cache-mode", rf.cache_mode, "off | replay | accounting");
  run->add_option("--llm-backend", rf.llm_backend, "remote | scripted");
  run->add_option("--script", rf.script, "Scripted completions file");
  run->add_option("--corpus", rf.corpus, "Local corpus file");
  run->add_option("--stop-after", rf.stop_after, "Stop after this many new questions");

  std::string score_dir;
  auto* score = app.add_subcommand("score", "Rescore a run's record log");
  score->add_option("run_dir", score_dir)->required();

  std::string analyze_dir;
  auto* analyze = app.add_subcommand("analyze", "Judge-subset and scenario tables");
  analyze->add_option("run_dir", analyze_dir)->required();

  std::vector<std::string> report_dirs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Compare runs side by side");
  report->add_option("run_dirs", report_dirs)->required();
  report->add_option("-o,--out", report_out)->required();

  std::string cache_dir;
  auto* cache = app.add_subcommand("cache", "Inspect or clear a completion cache");
  cache->require_subcommand(1);
  auto* inspect = cache->add_subcommand("inspect");
  inspect->add_option("--dir", cache_dir)->required();
  auto* clear = cache->add_subcommand("clear");
  clear->add_option("--dir", cache_dir)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*run) return do_run(rf);
    if (*score) {
      print_metrics(cmd_score(score_dir));
      return kExitOk;
    }
    if (*analyze) {
      auto aggs = cmd_analyze(analyze_dir);
      for (const auto& dir : expand_run_dirs(analyze_dir)) {
        std::ifstream in(dir / "analysis.txt");
        std::cout << in.rdbuf();
      }
      return kExitOk;
    }
    if (*report) {
      std::vector<fs::path> dirs(report_dirs.begin(), report_dirs.end());
      cmd_report(dirs, report_out);
      std::ifstream in(fs::path(report_out) / "table1.txt");
      std::cout << in.rdbuf();
      return kExitOk;
    }
    if (*inspect) {
      auto stats = DiskCache(cache_dir).stats();
      std::cout << fmt::format("{}: {} entries, {} bytes\n", cache_dir, stats.entries, stats.bytes);
      return kExitOk;
    }
    if (*clear) {
      std::cout << fmt::format("{}: removed {} entries\n", cache_dir, DiskCache(cache_dir).clear());
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    spdlog::error("invalid configuration: {}", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace rcourt::cli
