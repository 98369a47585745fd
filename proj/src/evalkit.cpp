#include "rcourt/evalkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>

namespace rcourt {

namespace {

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

double token_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : gold) ++counts[t];
  int same = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++same;
    }
  }
  if (same == 0) return 0.0;
  double precision = static_cast<double>(same) / static_cast<double>(pred.size());
  double recall = static_cast<double>(same) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

bool candidate_correct(const CandidateAnswer& c, const std::vector<std::string>& gold) {
  return !c.answer.empty() && exact_match(c.answer, gold) == 1;
}

}  // namespace

std::vector<std::string> normalize_answer(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (unsigned char c : text) {
    if (is_ascii_punct(c)) continue;
    cleaned.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && current != "a" && current != "an" && current != "the") {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (char c : cleaned) {
    if (is_ws(c)) {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return tokens;
}

std::string normalized_text(std::string_view text) {
  std::string out;
  for (const auto& t : normalize_answer(text)) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

int exact_match(std::string_view prediction, std::span<const std::string> gold) {
  auto pred = normalize_answer(prediction);
  for (const auto& g : gold) {
    if (normalize_answer(g) == pred) return 1;
  }
  return 0;
}

double f1_score(std::string_view prediction, std::span<const std::string> gold) {
  auto pred = normalize_answer(prediction);
  double best = 0.0;
  for (const auto& g : gold) best = std::max(best, token_f1(pred, normalize_answer(g)));
  return best;
}

std::uint64_t bounded_random(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("bound must be positive");
  // Values below `threshold` would make the low residues more likely.
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t x = rng();
    if (x >= threshold) return x % bound;
  }
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    auto j = static_cast<std::size_t>(bounded_random(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::string_view to_string(ScenarioBucket bucket) {
  switch (bucket) {
    case ScenarioBucket::OneCorrectOneIncorrect: return "one_correct_one_incorrect";
    case ScenarioBucket::DifferentIncorrectOrBothEmpty: return "different_incorrect_or_both_empty";
    case ScenarioBucket::SameNonEmptyIncorrect: return "same_nonempty_incorrect";
    case ScenarioBucket::BothCorrect: return "both_correct";
  }
  return "unknown";
}

std::string_view bucket_title(ScenarioBucket bucket) {
  switch (bucket) {
    case ScenarioBucket::OneCorrectOneIncorrect: return "One correct, one incorrect";
    case ScenarioBucket::DifferentIncorrectOrBothEmpty: return "Different incorrect or both empty";
    case ScenarioBucket::SameNonEmptyIncorrect: return "Same non-empty incorrect";
    case ScenarioBucket::BothCorrect: return "Both correct";
  }
  return "unknown";
}

ScenarioBucket bucket_judge_case(bool c1_correct, bool c2_correct, std::string_view a1,
                                 std::string_view a2) {
  if (c1_correct && c2_correct) return ScenarioBucket::BothCorrect;
  if (c1_correct != c2_correct) return ScenarioBucket::OneCorrectOneIncorrect;
  // Compared under the scoring normalizer, so surface variants that the
  // judge still saw ("The Beatles" / "Beatles") land here.
  auto n1 = normalized_text(a1);
  bool same_nonempty = !n1.empty() && n1 == normalized_text(a2);
  return same_nonempty ? ScenarioBucket::SameNonEmptyIncorrect
                       : ScenarioBucket::DifferentIncorrectOrBothEmpty;
}

bool is_judged(const RunRecord& record) {
  const auto& c = record.candidates;
  if (c.size() < 2) return false;
  return !short_circuit(c).has_value();
}

std::vector<RunRecord> judged_subset(std::span<const RunRecord> records) {
  std::vector<RunRecord> out;
  for (const auto& r : records) {
    if (is_judged(r)) out.push_back(r);
  }
  return out;
}

double BucketStats::accuracy() const {
  return count == 0 ? 0.0 : static_cast<double>(judge_correct) / static_cast<double>(count);
}

double percent_1dp(std::size_t part, std::size_t whole) {
  if (whole == 0) return 0.0;
  return std::round(1000.0 * static_cast<double>(part) / static_cast<double>(whole)) / 10.0;
}

Aggregate aggregate(std::span<const RunRecord> records) {
  if (records.empty()) throw EmptyInput("aggregate needs at least one record");

  std::vector<std::pair<std::string, Dataset>> keys;
  std::map<std::pair<std::string, Dataset>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    auto key = std::make_pair(r.strategy, r.dataset);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
  }

  Aggregate out;
  for (const auto& key : keys) {
    const auto& group = groups[key];
    MetricsSummary m;
    m.strategy = key.first;
    m.dataset = key.second;
    m.n = group.size();
    JudgedSummary judged;
    judged.strategy = key.first;
    judged.dataset = key.second;
    std::map<ScenarioBucket, BucketStats> buckets;

    for (const auto* r : group) {
      double em = r->failed() ? 0.0 : r->em;
      double f1 = r->failed() ? 0.0 : r->f1;
      if (r->failed()) ++m.failed;
      m.em_mean += em;
      m.f1_mean += f1;
      m.mean_calls += static_cast<double>(r->ledger.llm_calls);
      m.mean_time_seconds += r->ledger.wall_time_seconds;

      if (!is_judged(*r)) continue;
      ++judged.n;
      judged.em_mean += em;
      judged.f1_mean += f1;
      if (r->candidates.size() != 2) continue;
      auto bucket = bucket_judge_case(candidate_correct(r->candidates[0], r->gold),
                                      candidate_correct(r->candidates[1], r->gold),
                                      r->candidates[0].answer, r->candidates[1].answer);
      auto& stats = buckets[bucket];
      stats.bucket = bucket;
      ++stats.count;
      if (em == 1.0) ++stats.judge_correct;
    }
    auto n = static_cast<double>(m.n);
    m.em_mean /= n;
    m.f1_mean /= n;
    m.mean_calls /= n;
    m.mean_time_seconds /= n;
    if (judged.n > 0) {
      judged.em_mean /= static_cast<double>(judged.n);
      judged.f1_mean /= static_cast<double>(judged.n);
    }
    for (auto b : {ScenarioBucket::OneCorrectOneIncorrect, ScenarioBucket::DifferentIncorrectOrBothEmpty,
                   ScenarioBucket::SameNonEmptyIncorrect}) {
      auto it = buckets.find(b);
      judged.buckets.push_back(it != buckets.end() ? it->second : BucketStats{b, 0, 0});
    }
    if (auto it = buckets.find(ScenarioBucket::BothCorrect); it != buckets.end()) {
      judged.buckets.push_back(it->second);
    }
    out.metrics.push_back(std::move(m));
    out.judged.push_back(std::move(judged));
  }
  return out;
}

}  // namespace rcourt
