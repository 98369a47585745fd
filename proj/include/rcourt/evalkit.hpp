#pragma once

// Scoring, sampling, dataset loading and aggregation of record logs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rcourt/core.hpp"
#include "rcourt/errors.hpp"
#include "rcourt/run_record.hpp"

namespace rcourt {

// Identifiers pinned into run manifests.
inline constexpr std::string_view kNormalizerId = "squad-v1.1:lower/punct/articles/whitespace";
inline constexpr std::string_view kSamplerId = "fisher-yates/mt19937_64/rejection-v1";

// Lowercase, drop ASCII punctuation, drop the articles a/an/the, split on
// whitespace.
std::vector<std::string> normalize_answer(std::string_view text);
std::string normalized_text(std::string_view text);

// 1 when the normalized prediction equals any normalized gold answer.
int exact_match(std::string_view prediction, std::span<const std::string> gold);
// Max over gold answers of token-multiset F1.
double f1_score(std::string_view prediction, std::span<const std::string> gold);

// Uniform integer in [0, bound) by rejection, no modulo bias.
std::uint64_t bounded_random(std::mt19937_64& rng, std::uint64_t bound);

// Fisher-Yates over mt19937_64(seed).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

template <typename T>
std::vector<T> sample_eval_set(std::span<const T> items, std::size_t n, std::uint64_t seed) {
  if (n > items.size()) {
    throw InsufficientItems("requested " + std::to_string(n) + " items from a pool of " +
                            std::to_string(items.size()));
  }
  auto order = seeded_permutation(items.size(), seed);
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(items[order[i]]);
  return out;
}

// --- datasets ---------------------------------------------------------------

// HotpotQA: JSON array (or JSONL) of {_id, question, answer}.
// FEVER: JSONL of {id, claim, label}.
// MuSiQue: JSONL of {id, question, answer, answer_aliases, paragraphs[{title, paragraph_text}]}.
// Throws DatasetError naming the offending record.
std::vector<TaskSpec> load_dataset(Dataset dataset, const std::filesystem::path& path);

// --- analysis ---------------------------------------------------------------

enum class ScenarioBucket {
  OneCorrectOneIncorrect,
  DifferentIncorrectOrBothEmpty,
  SameNonEmptyIncorrect,
  BothCorrect,
};

std::string_view to_string(ScenarioBucket bucket);
std::string_view bucket_title(ScenarioBucket bucket);

ScenarioBucket bucket_judge_case(bool c1_correct, bool c2_correct, std::string_view a1,
                                 std::string_view a2);

// Candidates disagree, or at least one is empty.
bool is_judged(const RunRecord& record);
std::vector<RunRecord> judged_subset(std::span<const RunRecord> records);

struct MetricsSummary {
  std::string strategy;
  Dataset dataset = Dataset::HotpotQA;
  std::size_t n = 0;
  std::size_t failed = 0;
  double em_mean = 0.0;
  double f1_mean = 0.0;
  double mean_calls = 0.0;
  double mean_time_seconds = 0.0;
};

struct BucketStats {
  ScenarioBucket bucket = ScenarioBucket::OneCorrectOneIncorrect;
  std::size_t count = 0;
  std::size_t judge_correct = 0;
  double accuracy() const;  // fraction in [0, 1]
};

struct JudgedSummary {
  std::string strategy;
  Dataset dataset = Dataset::HotpotQA;
  std::size_t n = 0;
  double em_mean = 0.0;
  double f1_mean = 0.0;
  // Table order; BothCorrect only when non-empty.
  std::vector<BucketStats> buckets;
};

struct Aggregate {
  std::vector<MetricsSummary> metrics;
  std::vector<JudgedSummary> judged;
};

// Grouped by (strategy, dataset) in first-appearance order. Failed records
// count as wrong. Throws EmptyInput.
Aggregate aggregate(std::span<const RunRecord> records);

// Percentage rounded to one decimal place: 80/95 -> 84.2.
double percent_1dp(std::size_t part, std::size_t whole);

}  // namespace rcourt
