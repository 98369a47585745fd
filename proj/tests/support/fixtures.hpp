#pragma once

// Shared fixtures: the local test corpus, temporary directories and the
// scripted two-agent transcript about Jon Turteltaub and William Kronick.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "rcourt/core.hpp"
#include "rcourt/llm_gateway.hpp"
#include "rcourt/retrieval_env.hpp"

namespace rcourt::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(RCOURT_FIXTURE_DIR) / name;
}

inline std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(RCOURT_GOLDEN_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::shared_ptr<const Corpus> fixture_corpus() {
  static auto corpus = LocalCorpus::from_file(fixture_path("corpus.json"));
  return corpus;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("rcourt-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// A gateway, ledger and session over one backend, for a single question.
struct Harness {
  Harness(std::shared_ptr<CompletionBackend> b, const std::string& task_id,
          LedgerMode mode = LedgerMode::Replay)
      : backend(std::move(b)), gateway(backend, "test-model", mode), ledger(mode),
        session(gateway, ledger, task_id) {}

  long calls() const { return ledger.llm_calls(); }

  std::shared_ptr<CompletionBackend> backend;
  LlmGateway gateway;
  CallLedger ledger;
  LlmSession session;
};

// Fixed bindings for the rendered goldens. Set RCOURT_UPDATE_GOLDENS=1 to
// regenerate tests/golden/rendered after a deliberate template change.
inline const std::map<std::string, std::string>& canonical_vars() {
  static const std::map<std::string, std::string> vars = {
      {"question", "Were Scott Derrickson and Ed Wood of the same nationality?"},
      {"count", "two"},
      {"solutions", "Agent 1:\n<trajectory one>\nAgent 2:\n<trajectory two>"},
      {"answer", "yes"},
      {"trajectory", "Thought 1: <thought>\nAction 1: Finish[yes]\n"},
      {"rebuttal", "<opponent argument>"},
      {"feedback", "<feedback text>"},
  };
  return vars;
}

inline TaskSpec hotpot(const std::string& id, const std::string& question, const std::string& gold) {
  return make_task(id, Dataset::HotpotQA, question, {gold});
}

inline TaskSpec fever(const std::string& id, const std::string& claim, const std::string& label) {
  return make_task(id, Dataset::FEVER, claim, {label});
}

inline TaskSpec turteltaub_task() {
  return hotpot("fig1", "Are Jon Turteltaub and William Kronick both television writers?", "no");
}

// Agent 1 reads television production as writing and says yes; agent 2 keeps
// to what the pages state and says no; the judge sides with agent 2.
inline void add_turteltaub_script(ScriptedBackend& script, const std::string& task = "*") {
  const std::string first =
      " I need to search Jon Turteltaub and William Kronick, then find if they are both television "
      "writers.\nAction 1: Search[Jon Turteltaub]";
  script.add_sequence(task, "agent-1",
                      {first,
                       " Jon Turteltaub worked as an executive producer on television series, so he "
                       "works as a television writer. I need to search William Kronick next.\n"
                       "Action 2: Search[William Kronick]",
                       " William Kronick is a television writer. Both of them work in television, so "
                       "the answer is yes.\nAction 3: Finish[yes]"});
  script.add_sequence(task, "agent-2",
                      {first,
                       " Jon Turteltaub is a film director and producer. Nothing says he writes for "
                       "television. I need to search William Kronick.\nAction 2: Search[William Kronick]",
                       " William Kronick is explicitly a television writer, but Jon Turteltaub is not. "
                       "So the answer is no.\nAction 3: Finish[no]"});
  script.add(task, "judge", 1,
             "Agent 1 treats executive producing as writing, which its evidence does not show. "
             "Agent 2 keeps to what the pages state.\nAction: Complete[no].");
}

inline std::shared_ptr<ScriptedBackend> turteltaub_backend() {
  auto script = std::make_shared<ScriptedBackend>();
  add_turteltaub_script(*script);
  return script;
}

}  // namespace rcourt::testing
