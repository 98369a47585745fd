#include "rcourt/retrieval_env.hpp"

#include "rcourt/digest.hpp"
#include "rcourt/errors.hpp"
#include "rcourt/http.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <sstream>
#include <thread>

namespace rcourt {

namespace {

// Drops "== Section ==" headings and blank lines from a plain-text extract.
std::string strip_headings(const std::string& extract) {
  std::istringstream in(extract);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || (t.size() >= 4 && t.starts_with("==") && t.ends_with("=="))) continue;
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

WikipediaCorpus::WikipediaCorpus(WikipediaConfig config, std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  if (!config_.cache_dir.empty()) cache_.emplace(config_.cache_dir);
}

std::string WikipediaCorpus::fetch(const std::string& query) const {
  auto url = config_.api_url + "?" + query;
  auto key = sha256_hex(url);
  if (cache_) {
    if (auto hit = cache_->get(key)) return hit->at("body").get<std::string>();
  }

  UrlParts parts;
  try {
    parts = split_url(url);
  } catch (const std::invalid_argument& e) {
    throw CorpusUnavailable(e.what());
  }
  HttpClient client(parts.origin, config_.timeout_seconds);
  HttpHeaders headers{{"User-Agent", config_.user_agent}};

  std::string last_error;
  std::chrono::milliseconds backoff{1000};
  for (int attempt = 1; attempt <= 3; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    if (limiter_) limiter_->acquire();
    HttpResponse response;
    try {
      response = client.get(parts.path, headers);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    }
    if (response.status == 429 || response.status >= 500) {
      last_error = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status != 200) {
      throw CorpusUnavailable("wikipedia returned HTTP " + std::to_string(response.status));
    }
    if (cache_) cache_->put(key, {{"url", url}, {"body", response.body}});
    return response.body;
  }
  throw CorpusUnavailable("wikipedia unreachable: " + last_error);
}

std::optional<CorpusPage> WikipediaCorpus::find(const std::string& title) const {
  auto body = fetch(
      "action=query&format=json&formatversion=2&prop=extracts&explaintext=1&redirects=1&titles=" +
      url_encode(title));
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw CorpusUnavailable(std::string("wikipedia returned invalid JSON: ") + e.what());
  }
  const auto* pages = doc.contains("query") ? &doc["query"]["pages"] : nullptr;
  if (!pages || !pages->is_array() || pages->empty()) return std::nullopt;
  const auto& page = pages->at(0);
  if (page.value("missing", false) || page.value("invalid", false)) return std::nullopt;
  auto sentences = split_sentences(strip_headings(page.value("extract", std::string())));
  if (sentences.empty()) return std::nullopt;
  return CorpusPage{page.value("title", title), std::move(sentences)};
}

std::vector<std::string> WikipediaCorpus::similar(const std::string& entity,
                                                  std::size_t limit) const {
  auto body = fetch("action=opensearch&format=json&namespace=0&limit=" + std::to_string(limit) +
                    "&search=" + url_encode(entity));
  std::vector<std::string> out;
  try {
    auto doc = nlohmann::json::parse(body);
    if (doc.is_array() && doc.size() > 1 && doc[1].is_array()) {
      for (const auto& t : doc[1]) {
        if (out.size() >= limit) break;
        out.push_back(t.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorpusUnavailable(std::string("wikipedia returned invalid JSON: ") + e.what());
  }
  return out;
}

}  // namespace rcourt
