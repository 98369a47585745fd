#include "rcourt/retrieval_env.hpp"

#include "rcourt/errors.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>
#include <tuple>

namespace rcourt {

namespace {

std::vector<std::string> title_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string python_repr(std::string_view s) {
  bool has_single = s.find('\'') != std::string_view::npos;
  bool has_double = s.find('"') != std::string_view::npos;
  char quote = has_single && !has_double ? '"' : '\'';
  std::string out(1, quote);
  for (char c : s) {
    if (c == '\\' || c == quote) out.push_back('\\');
    out.push_back(c);
  }
  out.push_back(quote);
  return out;
}

std::string join_sentences(const std::vector<std::string>& sentences, std::size_t limit) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size() && i < limit; ++i) {
    if (i > 0) out.push_back(' ');
    out += sentences[i];
  }
  return out;
}

}  // namespace

double normalized_edit_distance(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[b.size()]) / static_cast<double>(std::max(a.size(), b.size()));
}

std::vector<std::string> rank_similar_titles(const std::string& entity,
                                             const std::vector<std::string>& titles,
                                             std::size_t limit, bool require_overlap) {
  auto query_tokens = title_tokens(entity);
  std::set<std::string> query(query_tokens.begin(), query_tokens.end());
  auto query_norm = normalize_title(entity);

  using Scored = std::tuple<long, double, std::string>;  // (-overlap, distance, title)
  std::vector<Scored> scored;
  std::set<std::string> seen;
  for (const auto& title : titles) {
    auto norm = normalize_title(title);
    if (!seen.insert(norm).second) continue;
    auto tokens = title_tokens(title);
    std::set<std::string> distinct(tokens.begin(), tokens.end());
    long overlap = 0;
    for (const auto& t : distinct) overlap += query.count(t);
    if (require_overlap && overlap == 0) continue;
    scored.emplace_back(-overlap, normalized_edit_distance(query_norm, norm), title);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < limit; ++i) out.push_back(std::get<2>(scored[i]));
  return out;
}

std::string not_found_observation(std::string_view entity, const std::vector<std::string>& similar) {
  std::string out = "Could not find [" + std::string(entity) + "]. Similar: [";
  for (std::size_t i = 0; i < similar.size(); ++i) {
    if (i > 0) out += ", ";
    out += python_repr(similar[i]);
  }
  out += "].";
  return out;
}

// --- local corpus -----------------------------------------------------------

LocalCorpus::LocalCorpus(std::vector<std::pair<std::string, std::string>> records) {
  for (auto& [title, text] : records) {
    auto key = normalize_title(title);
    if (key.empty()) throw DatasetError("corpus record with empty title");
    if (index_.count(key)) {
      spdlog::warn("corpus: duplicate title '{}' ignored", title);
      continue;
    }
    auto sentences = split_sentences(text);
    if (sentences.empty()) {
      spdlog::warn("corpus: page '{}' has no text; skipped", title);
      continue;
    }
    index_.emplace(key, pages_.size());
    titles_.push_back(title);
    pages_.push_back(CorpusPage{std::move(title), std::move(sentences)});
  }
}

std::shared_ptr<LocalCorpus> LocalCorpus::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusUnavailable("cannot open corpus file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CorpusUnavailable("corpus file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_array()) throw CorpusUnavailable("corpus file must hold a JSON array");
  std::vector<std::pair<std::string, std::string>> records;
  for (const auto& r : doc) {
    records.emplace_back(r.at("title").get<std::string>(), r.at("text").get<std::string>());
  }
  return std::make_shared<LocalCorpus>(std::move(records));
}

std::optional<CorpusPage> LocalCorpus::find(const std::string& title) const {
  auto it = index_.find(normalize_title(title));
  if (it == index_.end()) return std::nullopt;
  return pages_[it->second];
}

std::vector<std::string> LocalCorpus::similar(const std::string& entity, std::size_t limit) const {
  return rank_similar_titles(entity, titles_, limit, true);
}

// --- session ----------------------------------------------------------------

EnvSession::EnvSession(Dataset dataset, std::shared_ptr<const Corpus> corpus,
                       std::optional<std::vector<Paragraph>> context)
    : dataset_(dataset), corpus_(std::move(corpus)), context_(std::move(context)) {
  if (context_) {
    std::set<std::string> seen;
    for (const auto& p : *context_) {
      auto key = normalize_title(p.title);
      if (!seen.insert(key).second &&
          std::find(duplicates_.begin(), duplicates_.end(), p.title) == duplicates_.end()) {
        spdlog::warn("context: duplicate paragraph title '{}'; the first occurrence is used", p.title);
        duplicates_.push_back(p.title);
      }
    }
  }
}

EnvSession EnvSession::for_task(const TaskSpec& task, std::shared_ptr<const Corpus> corpus) {
  return EnvSession(task.dataset, std::move(corpus), task.context);
}

std::string EnvSession::search(const std::string& entity) {
  if (dataset_ == Dataset::MuSiQue) throw std::logic_error("search is not available for MuSiQue");
  if (!corpus_) throw CorpusUnavailable("no corpus configured");
  auto query = trim(entity);
  auto page = corpus_->find(query);
  if (!page) return not_found_observation(query, corpus_->similar(query, kMaxSuggestions));

  auto key = normalize_title(page->title);
  for (auto it = cursors_.begin(); it != cursors_.end();) {
    it = it->first.first == key ? cursors_.erase(it) : std::next(it);
  }
  current_ = std::move(page);
  return join_sentences(current_->sentences, kExcerptSentences);
}

std::string EnvSession::lookup(const std::string& needle) {
  if (dataset_ == Dataset::MuSiQue) throw std::logic_error("lookup is not available for MuSiQue");
  if (!current_) return std::string(kSearchFirst);
  auto lowered = to_lower(trim(needle));
  std::vector<const std::string*> matches;
  for (const auto& s : current_->sentences) {
    if (to_lower(s).find(lowered) != std::string::npos) matches.push_back(&s);
  }
  auto& cursor = cursors_[{normalize_title(current_->title), lowered}];
  if (cursor >= matches.size()) return std::string(kNoMoreResults);
  ++cursor;
  return "(Result " + std::to_string(cursor) + " / " + std::to_string(matches.size()) + ") " +
         *matches[cursor - 1];
}

std::string EnvSession::title_lookup(const std::string& title) {
  if (dataset_ != Dataset::MuSiQue) {
    throw std::logic_error("title lookup is only available for MuSiQue");
  }
  if (!context_) throw MissingContext("MuSiQue session has no context paragraphs");
  auto query = trim(title);
  auto key = normalize_title(query);
  for (const auto& p : *context_) {
    if (normalize_title(p.title) == key) return p.text;
  }
  std::vector<std::string> titles;
  for (const auto& p : *context_) titles.push_back(p.title);
  return not_found_observation(query, rank_similar_titles(query, titles, kMaxSuggestions, false));
}

std::string EnvSession::execute(const Action& action) {
  if (!action_allowed(action.kind, dataset_)) {
    throw std::logic_error("action not permitted for " + std::string(to_string(dataset_)));
  }
  switch (action.kind) {
    case ActionKind::Search: return search(action.payload);
    case ActionKind::Lookup: return lookup(action.payload);
    case ActionKind::TitleLookup: return title_lookup(action.payload);
    case ActionKind::Finish: return "";
  }
  return "";
}

}  // namespace rcourt
