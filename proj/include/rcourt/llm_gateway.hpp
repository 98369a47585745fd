#pragma once

// Text-completion interface over interchangeable backends (remote HTTP
// endpoint, scripted replay, on-disk cache) plus the per-question call ledger.

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "rcourt/disk_cache.hpp"
#include "rcourt/rate_limiter.hpp"

namespace rcourt {

inline constexpr int kAgentMaxTokens = 512;
inline constexpr int kJudgeMaxTokens = 1024;
inline constexpr double kGreedyTemperature = 0.0;
inline constexpr double kSamplingTemperature = 0.7;

enum class BackendKind { Remote, Scripted, CacheHit };

std::string_view to_string(BackendKind kind);

// Replay: cache hits are free. Accounting: cache hits count as LLM calls, so a
// replayed run reports the same call counts as the original.
enum class LedgerMode { Replay, Accounting };

std::string_view to_string(LedgerMode mode);
LedgerMode ledger_mode_from_string(std::string_view name);

struct CompletionRequest {
  std::string prompt;
  double temperature = kGreedyTemperature;
  int max_tokens = kAgentMaxTokens;
  std::vector<std::string> stop;
  int sample_index = 0;
  std::string model_id;

  // Routing metadata for deterministic replay. Not part of the cache key.
  std::string task_id;
  std::string label;
  int step = 1;
};

struct CompletionResult {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  std::chrono::duration<double> latency{0.0};
  BackendKind backend = BackendKind::Scripted;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
};

// Responses keyed by (task_id, label, step); a task id of "*" matches any task.
// Lookups never depend on call order, so concurrent agents replay identically.
class ScriptedBackend : public CompletionBackend {
 public:
  void add(std::string task_id, std::string label, int step, std::string text);
  // Convenience: steps 1..n for one label.
  void add_sequence(const std::string& task_id, const std::string& label,
                    const std::vector<std::string>& texts);

  // {"responses": [{"task": "...", "label": "...", "step": 1, "text": "..."}]}
  static std::shared_ptr<ScriptedBackend> from_json(const nlohmann::json& script);
  static std::shared_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

  CompletionResult complete(const CompletionRequest& request) override;

  std::size_t size() const;

 private:
  using Key = std::tuple<std::string, std::string, int>;
  std::map<Key, std::string> responses_;
  mutable std::shared_mutex mutex_;
};

// Scripted responses computed by a function of the request.
class CallbackBackend : public CompletionBackend {
 public:
  using Fn = std::function<std::string(const CompletionRequest&)>;
  explicit CallbackBackend(Fn fn) : fn_(std::move(fn)) {}

  CompletionResult complete(const CompletionRequest& request) override;

 private:
  Fn fn_;
};

struct RemoteConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string auth_header = "Authorization";
  std::string auth_prefix = "Bearer ";
  std::string api_key_env = "OPENAI_API_KEY";
  // Request body template. String values "$prompt", "$model", "$temperature",
  // "$max_tokens" and "$stop" are replaced by typed request values.
  nlohmann::json request_template = default_request_template();
  std::string response_text_pointer = "/choices/0/message/content";
  double timeout_seconds = 120.0;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};

  static nlohmann::json default_request_template();
};

nlohmann::json render_request_body(const nlohmann::json& request_template,
                                   const CompletionRequest& request);

// chat/completions-style HTTP+JSON endpoint. Retries transport errors, 429 and
// 5xx with exponential backoff; other statuses fail immediately.
class RemoteBackend : public CompletionBackend {
 public:
  RemoteBackend(RemoteConfig config, std::shared_ptr<RateLimiter> limiter);

  CompletionResult complete(const CompletionRequest& request) override;

 private:
  RemoteConfig config_;
  std::shared_ptr<RateLimiter> limiter_;
  std::string api_key_;
};

// Wraps another backend with a persistent content-addressed cache keyed on
// digest(model_id, prompt, temperature, sample_index).
class CachingBackend : public CompletionBackend {
 public:
  CachingBackend(std::shared_ptr<CompletionBackend> inner, std::filesystem::path dir);

  static std::string cache_key(const CompletionRequest& request);

  CompletionResult complete(const CompletionRequest& request) override;

  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t misses() const { return misses_.load(); }

 private:
  std::shared_ptr<CompletionBackend> inner_;
  DiskCache cache_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

struct LedgerSnapshot {
  long llm_calls = 0;
  long remote = 0;
  long scripted = 0;
  long cache_hits = 0;
  double latency_seconds = 0.0;
  double wall_time_seconds = 0.0;

  bool operator==(const LedgerSnapshot&) const = default;
};

void to_json(nlohmann::json& j, const LedgerSnapshot& snapshot);
void from_json(const nlohmann::json& j, LedgerSnapshot& snapshot);

// Per-question accounting. Counters are atomic so concurrent agents of one
// question can share a ledger.
class CallLedger {
 public:
  explicit CallLedger(LedgerMode mode = LedgerMode::Replay) : mode_(mode) {}

  void record(const CompletionResult& result);
  void set_wall_time(std::chrono::duration<double> wall);

  long llm_calls() const { return llm_calls_.load(); }
  LedgerMode mode() const { return mode_; }
  LedgerSnapshot snapshot() const;

 private:
  LedgerMode mode_;
  std::atomic<long> llm_calls_{0};
  std::atomic<long> remote_{0};
  std::atomic<long> scripted_{0};
  std::atomic<long> cache_hits_{0};
  std::atomic<long long> latency_us_{0};
  std::atomic<long long> wall_us_{0};
};

struct LedgerSummary {
  double mean_calls = 0.0;
  double mean_time_seconds = 0.0;
};

// Arithmetic means over questions. Throws EmptyInput.
LedgerSummary ledger_summary(std::span<const LedgerSnapshot> records);

// Shared entry point: fills in the model id and feeds the caller's ledger.
class LlmGateway {
 public:
  LlmGateway(std::shared_ptr<CompletionBackend> backend, std::string model_id,
             LedgerMode mode = LedgerMode::Replay);

  CompletionResult complete(CompletionRequest request, CallLedger& ledger) const;

  const std::string& model_id() const { return model_id_; }
  LedgerMode mode() const { return mode_; }

 private:
  std::shared_ptr<CompletionBackend> backend_;
  std::string model_id_;
  LedgerMode mode_;
};

// Per-question handle: stamps the task id on every request and accumulates
// into that question's ledger.
class LlmSession {
 public:
  LlmSession(const LlmGateway& gateway, CallLedger& ledger, std::string task_id);

  CompletionResult complete(CompletionRequest request) const;

  CallLedger& ledger() const { return ledger_; }
  const std::string& task_id() const { return task_id_; }

 private:
  const LlmGateway& gateway_;
  CallLedger& ledger_;
  std::string task_id_;
};

}  // namespace rcourt
