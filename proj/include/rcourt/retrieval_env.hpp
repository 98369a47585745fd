#pragma once

// Observation-producing environments: page search/lookup for HotpotQA and
// FEVER, paragraph-title lookup over a question's own context for MuSiQue.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcourt/core.hpp"
#include "rcourt/disk_cache.hpp"
#include "rcourt/rate_limiter.hpp"

namespace rcourt {

inline constexpr std::size_t kExcerptSentences = 5;
inline constexpr std::size_t kMaxSuggestions = 5;

inline constexpr std::string_view kNoMoreResults = "No more results.";
inline constexpr std::string_view kSearchFirst = "You must Search for a page first.";

// Splits on '.', '?' or '!' followed by whitespace and then a capital letter,
// digit, opening quote/parenthesis or non-ASCII character, or by end of text.
// Common abbreviations ("U.S.", "Dr.", "St.", ...) and single-letter initials
// do not end a sentence.
std::vector<std::string> split_sentences(std::string_view text);

// Lowercase, whitespace runs collapsed to one space, trimmed.
std::string normalize_title(std::string_view title);

struct CorpusPage {
  std::string title;
  std::vector<std::string> sentences;
};

class Corpus {
 public:
  virtual ~Corpus() = default;
  // Exact match under normalize_title.
  virtual std::optional<CorpusPage> find(const std::string& title) const = 0;
  // At most `limit` related titles, best first.
  virtual std::vector<std::string> similar(const std::string& entity, std::size_t limit) const = 0;
};

// Ranks by number of distinct shared tokens, then normalized edit distance,
// then title. With require_overlap, titles sharing no token are dropped.
std::vector<std::string> rank_similar_titles(const std::string& entity,
                                             const std::vector<std::string>& titles,
                                             std::size_t limit, bool require_overlap = true);

double normalized_edit_distance(std::string_view a, std::string_view b);

// In-memory corpus from a JSON array of {"title", "text"} records.
class LocalCorpus : public Corpus {
 public:
  explicit LocalCorpus(std::vector<std::pair<std::string, std::string>> records);
  static std::shared_ptr<LocalCorpus> from_file(const std::filesystem::path& path);

  std::optional<CorpusPage> find(const std::string& title) const override;
  std::vector<std::string> similar(const std::string& entity, std::size_t limit) const override;

  std::size_t size() const { return pages_.size(); }

 private:
  std::vector<CorpusPage> pages_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> titles_;
};

struct WikipediaConfig {
  std::string api_url = "https://en.wikipedia.org/w/api.php";
  std::filesystem::path cache_dir;  // empty disables the response cache
  double timeout_seconds = 30.0;
  std::string user_agent = "rcourt/0.1 (research harness)";
};

// MediaWiki API: plain-text extracts (redirects followed) and opensearch for
// suggestions. Every failure surfaces as CorpusUnavailable.
class WikipediaCorpus : public Corpus {
 public:
  WikipediaCorpus(WikipediaConfig config, std::shared_ptr<RateLimiter> limiter);

  std::optional<CorpusPage> find(const std::string& title) const override;
  std::vector<std::string> similar(const std::string& entity, std::size_t limit) const override;

 private:
  std::string fetch(const std::string& query) const;

  WikipediaConfig config_;
  std::shared_ptr<RateLimiter> limiter_;
  std::optional<DiskCache> cache_;
};

// "Could not find [X]. Similar: ['a', 'b']."
std::string not_found_observation(std::string_view entity, const std::vector<std::string>& similar);

// Per-trajectory environment state. Single owner; never shared between agents.
class EnvSession {
 public:
  EnvSession(Dataset dataset, std::shared_ptr<const Corpus> corpus,
             std::optional<std::vector<Paragraph>> context = std::nullopt);

  static EnvSession for_task(const TaskSpec& task, std::shared_ptr<const Corpus> corpus);

  std::string search(const std::string& entity);
  std::string lookup(const std::string& needle);
  std::string title_lookup(const std::string& title);

  // Dispatches Search/Lookup/TitleLookup. Finish has no observation.
  std::string execute(const Action& action);

  Dataset dataset() const { return dataset_; }
  const std::optional<CorpusPage>& current_page() const { return current_; }
  // Titles that occur more than once in the MuSiQue context.
  const std::vector<std::string>& duplicate_titles() const { return duplicates_; }

 private:
  Dataset dataset_;
  std::shared_ptr<const Corpus> corpus_;
  std::optional<std::vector<Paragraph>> context_;
  std::optional<CorpusPage> current_;
  std::map<std::pair<std::string, std::string>, std::size_t> cursors_;
  std::vector<std::string> duplicates_;
};

}  // namespace rcourt
