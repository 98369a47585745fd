#include "rcourt/llm_gateway.hpp"

#include "rcourt/digest.hpp"
#include "rcourt/errors.hpp"
#include "rcourt/http.hpp"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace rcourt {

namespace {

using Clock = std::chrono::steady_clock;

int rough_token_count(std::string_view text) {
  int count = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

CompletionResult scripted_result(std::string text, const CompletionRequest& request) {
  CompletionResult result;
  result.prompt_tokens = rough_token_count(request.prompt);
  result.completion_tokens = rough_token_count(text);
  result.text = std::move(text);
  result.backend = BackendKind::Scripted;
  return result;
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Remote: return "remote";
    case BackendKind::Scripted: return "scripted";
    case BackendKind::CacheHit: return "cache_hit";
  }
  return "unknown";
}

std::string_view to_string(LedgerMode mode) {
  return mode == LedgerMode::Replay ? "replay" : "accounting";
}

LedgerMode ledger_mode_from_string(std::string_view name) {
  if (name == "replay") return LedgerMode::Replay;
  if (name == "accounting") return LedgerMode::Accounting;
  throw std::invalid_argument("unknown ledger mode: " + std::string(name));
}

// --- scripted ---------------------------------------------------------------

void ScriptedBackend::add(std::string task_id, std::string label, int step, std::string text) {
  std::unique_lock lock(mutex_);
  responses_[{std::move(task_id), std::move(label), step}] = std::move(text);
}

void ScriptedBackend::add_sequence(const std::string& task_id, const std::string& label,
                                   const std::vector<std::string>& texts) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    add(task_id, label, static_cast<int>(i) + 1, texts[i]);
  }
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_json(const nlohmann::json& script) {
  auto backend = std::make_shared<ScriptedBackend>();
  for (const auto& entry : script.at("responses")) {
    backend->add(entry.value("task", std::string("*")), entry.at("label").get<std::string>(),
                 entry.value("step", 1), entry.at("text").get<std::string>());
  }
  return backend;
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open script " + path.string());
  return from_json(nlohmann::json::parse(in));
}

CompletionResult ScriptedBackend::complete(const CompletionRequest& request) {
  std::shared_lock lock(mutex_);
  auto it = responses_.find({request.task_id, request.label, request.step});
  if (it == responses_.end()) it = responses_.find({"*", request.label, request.step});
  if (it == responses_.end()) {
    throw ScriptExhausted("no scripted response for task '" + request.task_id + "', label '" +
                          request.label + "', step " + std::to_string(request.step));
  }
  return scripted_result(it->second, request);
}

std::size_t ScriptedBackend::size() const {
  std::shared_lock lock(mutex_);
  return responses_.size();
}

CompletionResult CallbackBackend::complete(const CompletionRequest& request) {
  return scripted_result(fn_(request), request);
}

// --- remote -----------------------------------------------------------------

nlohmann::json RemoteConfig::default_request_template() {
  return {{"model", "$model"},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", "$prompt"}}})},
          {"temperature", "$temperature"},
          {"max_tokens", "$max_tokens"},
          {"stop", "$stop"}};
}

nlohmann::json render_request_body(const nlohmann::json& request_template,
                                   const CompletionRequest& request) {
  if (request_template.is_string()) {
    const auto& s = request_template.get_ref<const std::string&>();
    if (s == "$prompt") return request.prompt;
    if (s == "$model") return request.model_id;
    if (s == "$temperature") return request.temperature;
    if (s == "$max_tokens") return request.max_tokens;
    if (s == "$stop") return request.stop;
    return s;
  }
  if (request_template.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : request_template.items()) {
      auto rendered = render_request_body(value, request);
      // An empty stop list is dropped; some endpoints reject "stop": [].
      if (key == "stop" && rendered.is_array() && rendered.empty()) continue;
      out[key] = std::move(rendered);
    }
    return out;
  }
  if (request_template.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& value : request_template) out.push_back(render_request_body(value, request));
    return out;
  }
  return request_template;
}

RemoteBackend::RemoteBackend(RemoteConfig config, std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
  if (config_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
}

CompletionResult RemoteBackend::complete(const CompletionRequest& request) {
  auto url = split_url(config_.base_url);
  auto path = url.path == "/" ? config_.path : url.path + config_.path;
  HttpClient client(url.origin, config_.timeout_seconds);
  HttpHeaders headers;
  if (!api_key_.empty() && !config_.auth_header.empty()) {
    headers.emplace_back(config_.auth_header, config_.auth_prefix + api_key_);
  }
  auto body = render_request_body(config_.request_template, request).dump();

  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      spdlog::warn("completion attempt {} failed ({}); retrying in {} ms", attempt - 1, last_error,
                   backoff.count());
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    if (limiter_) limiter_->acquire();

    auto start = Clock::now();
    HttpResponse response;
    try {
      response = client.post(path, body, "application/json", headers);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    }
    auto latency = Clock::now() - start;

    if (response.status == 429 || response.status >= 500) {
      last_error = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status < 200 || response.status >= 300) {
      throw BackendUnavailable("completion endpoint returned HTTP " +
                               std::to_string(response.status) + ": " + response.body.substr(0, 500));
    }

    nlohmann::json payload;
    try {
      payload = nlohmann::json::parse(response.body);
    } catch (const nlohmann::json::exception& e) {
      throw BackendUnavailable(std::string("completion endpoint returned invalid JSON: ") + e.what());
    }
    nlohmann::json::json_pointer pointer(config_.response_text_pointer);
    if (!payload.contains(pointer) || !payload.at(pointer).is_string()) {
      throw BackendUnavailable("completion response has no text at " + config_.response_text_pointer);
    }

    CompletionResult result;
    result.text = payload.at(pointer).get<std::string>();
    result.latency = latency;
    result.backend = BackendKind::Remote;
    if (payload.contains("usage")) {
      result.prompt_tokens = payload["usage"].value("prompt_tokens", 0);
      result.completion_tokens = payload["usage"].value("completion_tokens", 0);
    }
    return result;
  }
  throw BackendUnavailable("completion endpoint unavailable after " +
                           std::to_string(config_.max_attempts) + " attempts: " + last_error);
}

// --- cache ------------------------------------------------------------------

CachingBackend::CachingBackend(std::shared_ptr<CompletionBackend> inner, std::filesystem::path dir)
    : inner_(std::move(inner)), cache_(std::move(dir)) {}

std::string CachingBackend::cache_key(const CompletionRequest& request) {
  nlohmann::json key = {{"model_id", request.model_id},
                        {"prompt", request.prompt},
                        {"temperature", request.temperature},
                        {"sample_index", request.sample_index}};
  return sha256_hex(key.dump());
}

CompletionResult CachingBackend::complete(const CompletionRequest& request) {
  auto key = cache_key(request);
  if (auto entry = cache_.get(key)) {
    const auto& stored = (*entry)["result"];
    CompletionResult result;
    result.text = stored.at("text").get<std::string>();
    result.prompt_tokens = stored.value("prompt_tokens", 0);
    result.completion_tokens = stored.value("completion_tokens", 0);
    result.backend = BackendKind::CacheHit;
    ++hits_;
    return result;
  }
  auto result = inner_->complete(request);
  ++misses_;
  nlohmann::json entry = {
      {"key", key},
      {"request",
       {{"model_id", request.model_id},
        {"temperature", request.temperature},
        {"sample_index", request.sample_index},
        {"prompt", request.prompt}}},
      {"result",
       {{"text", result.text},
        {"prompt_tokens", result.prompt_tokens},
        {"completion_tokens", result.completion_tokens},
        {"latency_seconds", result.latency.count()},
        {"backend", to_string(result.backend)}}}};
  cache_.put(key, entry);
  return result;
}

// --- ledger -----------------------------------------------------------------

void to_json(nlohmann::json& j, const LedgerSnapshot& s) {
  j = {{"llm_calls", s.llm_calls},
       {"remote", s.remote},
       {"scripted", s.scripted},
       {"cache_hits", s.cache_hits},
       {"latency_seconds", s.latency_seconds},
       {"wall_time_seconds", s.wall_time_seconds}};
}

void from_json(const nlohmann::json& j, LedgerSnapshot& s) {
  s.llm_calls = j.at("llm_calls").get<long>();
  s.remote = j.value("remote", 0L);
  s.scripted = j.value("scripted", 0L);
  s.cache_hits = j.value("cache_hits", 0L);
  s.latency_seconds = j.value("latency_seconds", 0.0);
  s.wall_time_seconds = j.value("wall_time_seconds", 0.0);
}

void CallLedger::record(const CompletionResult& result) {
  switch (result.backend) {
    case BackendKind::Remote:
      ++remote_;
      ++llm_calls_;
      break;
    case BackendKind::Scripted:
      ++scripted_;
      ++llm_calls_;
      break;
    case BackendKind::CacheHit:
      ++cache_hits_;
      if (mode_ == LedgerMode::Accounting) ++llm_calls_;
      break;
  }
  latency_us_ += static_cast<long long>(result.latency.count() * 1e6);
}

void CallLedger::set_wall_time(std::chrono::duration<double> wall) {
  wall_us_ = static_cast<long long>(wall.count() * 1e6);
}

LedgerSnapshot CallLedger::snapshot() const {
  LedgerSnapshot s;
  s.llm_calls = llm_calls_.load();
  s.remote = remote_.load();
  s.scripted = scripted_.load();
  s.cache_hits = cache_hits_.load();
  s.latency_seconds = static_cast<double>(latency_us_.load()) / 1e6;
  s.wall_time_seconds = static_cast<double>(wall_us_.load()) / 1e6;
  return s;
}

LedgerSummary ledger_summary(std::span<const LedgerSnapshot> records) {
  if (records.empty()) throw EmptyInput("ledger_summary needs at least one ledger");
  double calls = 0.0;
  double time = 0.0;
  for (const auto& r : records) {
    calls += static_cast<double>(r.llm_calls);
    time += r.wall_time_seconds;
  }
  auto n = static_cast<double>(records.size());
  return {calls / n, time / n};
}

// --- gateway ----------------------------------------------------------------

LlmGateway::LlmGateway(std::shared_ptr<CompletionBackend> backend, std::string model_id,
                       LedgerMode mode)
    : backend_(std::move(backend)), model_id_(std::move(model_id)), mode_(mode) {
  if (!backend_) throw std::invalid_argument("LlmGateway requires a backend");
}

CompletionResult LlmGateway::complete(CompletionRequest request, CallLedger& ledger) const {
  if (request.model_id.empty()) request.model_id = model_id_;
  if (request.temperature < 0) throw std::invalid_argument("temperature must be non-negative");
  if (request.max_tokens <= 0) throw std::invalid_argument("max_tokens must be positive");
  auto start = Clock::now();
  auto result = backend_->complete(request);
  if (result.backend != BackendKind::Remote) result.latency = Clock::now() - start;
  ledger.record(result);
  return result;
}

LlmSession::LlmSession(const LlmGateway& gateway, CallLedger& ledger, std::string task_id)
    : gateway_(gateway), ledger_(ledger), task_id_(std::move(task_id)) {}

CompletionResult LlmSession::complete(CompletionRequest request) const {
  request.task_id = task_id_;
  return gateway_.complete(std::move(request), ledger_);
}

}  // namespace rcourt
