#include "rcourt/run_record.hpp"

#include "rcourt/errors.hpp"

#include <fstream>

namespace rcourt {

void to_json(nlohmann::json& j, const RunRecord& r) {
  j = nlohmann::json::object();
  j["task_id"] = r.task_id;
  j["dataset"] = to_string(r.dataset);
  j["strategy"] = r.strategy;
  j["run_index"] = r.run_index;
  j["question"] = r.question;
  j["gold"] = r.gold;
  j["candidates"] = r.candidates;
  j["verdict"] = r.verdict ? nlohmann::json(*r.verdict) : nlohmann::json(nullptr);
  j["final_answer"] = r.final_answer;
  j["fallback"] = r.fallback ? nlohmann::json(*r.fallback) : nlohmann::json(nullptr);
  j["extras"] = r.extras;
  j["metrics"] = {{"em", r.em}, {"f1", r.f1}};
  j["ledger"] = {{"llm_calls", r.ledger.llm_calls},
                 {"remote", r.ledger.remote},
                 {"scripted", r.ledger.scripted},
                 {"cache_hits", r.ledger.cache_hits}};
  j["timing"] = {{"latency_seconds", r.ledger.latency_seconds},
                 {"wall_time_seconds", r.ledger.wall_time_seconds}};
  j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, RunRecord& r) {
  r.task_id = j.at("task_id").get<std::string>();
  r.dataset = dataset_from_string(j.at("dataset").get<std::string>());
  r.strategy = j.at("strategy").get<std::string>();
  r.run_index = j.value("run_index", 0);
  r.question = j.value("question", std::string());
  r.gold = j.at("gold").get<std::vector<std::string>>();
  r.candidates = j.value("candidates", std::vector<CandidateAnswer>{});
  if (j.contains("verdict") && !j["verdict"].is_null()) {
    r.verdict = j["verdict"].get<Verdict>();
  } else {
    r.verdict.reset();
  }
  r.final_answer = j.at("final_answer").get<std::string>();
  if (j.contains("fallback") && !j["fallback"].is_null()) {
    r.fallback = j["fallback"].get<std::string>();
  } else {
    r.fallback.reset();
  }
  r.extras = j.value("extras", nlohmann::json::object());
  const auto& metrics = j.at("metrics");
  r.em = metrics.at("em").get<double>();
  r.f1 = metrics.at("f1").get<double>();
  const auto& ledger = j.at("ledger");
  r.ledger.llm_calls = ledger.at("llm_calls").get<long>();
  r.ledger.remote = ledger.value("remote", 0L);
  r.ledger.scripted = ledger.value("scripted", 0L);
  r.ledger.cache_hits = ledger.value("cache_hits", 0L);
  if (j.contains("timing")) {
    r.ledger.latency_seconds = j["timing"].value("latency_seconds", 0.0);
    r.ledger.wall_time_seconds = j["timing"].value("wall_time_seconds", 0.0);
  }
  if (j.contains("error") && !j["error"].is_null()) {
    r.error = j["error"].get<std::string>();
  } else {
    r.error.reset();
  }
}

std::vector<RunRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RecordError(0, "cannot open " + path.string());
  std::vector<RunRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      records.push_back(nlohmann::json::parse(line).get<RunRecord>());
    } catch (const std::exception& e) {
      throw RecordError(number, e.what());
    }
  }
  return records;
}

}  // namespace rcourt
