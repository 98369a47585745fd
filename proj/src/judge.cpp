#include "rcourt/judge.hpp"

#include <array>
#include <future>
#include <sstream>
#include <stdexcept>

namespace rcourt {

namespace {

std::string last_nonempty_line(std::string_view text) {
  std::string last;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) last = std::move(t);
  }
  return last;
}

std::vector<std::size_t> presentation_order(std::size_t n, bool swap) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = swap ? n - 1 - i : i;
  return order;
}

void require_candidates(std::span<const CandidateAnswer> candidates) {
  if (candidates.empty()) throw std::invalid_argument("adjudication needs at least one candidate");
}

std::string fallback_answer(const TaskSpec& task, std::span<const CandidateAnswer> candidates) {
  for (const auto& c : candidates) {
    if (!c.answer.empty()) return c.answer;
  }
  return task.dataset == Dataset::FEVER ? std::string(kNotEnoughInfo) : "unknown";
}

Verdict adjudicate(const TaskSpec& task, std::span<const CandidateAnswer> candidates,
                   const LlmSession& llm, const JudgeConfig& config, const std::string& prompt,
                   bool answers_only) {
  CompletionRequest req;
  req.prompt = prompt;
  req.temperature = config.temperature;
  req.max_tokens = config.max_tokens;
  req.label = config.label;
  req.step = 1;

  Verdict verdict;
  auto first = llm.complete(req).text;
  verdict.judge_calls = 1;
  verdict.parse_attempts = 1;
  verdict.rationale = first;
  auto answer = extract_complete(first);

  std::string retry;
  if (!answer) {
    req.prompt = prompt + first + std::string(kRestateInstruction);
    req.step = 2;
    retry = llm.complete(req).text;
    verdict.judge_calls = 2;
    verdict.parse_attempts = 2;
    verdict.rationale += "\n\n" + retry;
    answer = extract_complete(retry);
  }

  bool from_protocol = answer.has_value();
  if (!from_protocol) {
    verdict.parse_failed = true;
    if (task.dataset == Dataset::FEVER) {
      answer = fever_label(retry);
      if (!answer) answer = fever_label(first);
    }
    if (!answer) {
      auto line = last_nonempty_line(retry);
      if (line.empty()) line = last_nonempty_line(first);
      if (!line.empty()) answer = clean_answer(line);
    }
    if (!answer || answer->empty()) answer = fallback_answer(task, candidates);
  }

  if (task.dataset == Dataset::FEVER) {
    if (auto label = fever_label(*answer)) {
      answer = *label;
    } else {
      answer = to_upper(*answer);
      verdict.invalid_label = true;
    }
  }
  verdict.final_answer = *answer;

  verdict.mode = VerdictMode::Synthesized;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].answer.empty() && answers_match(candidates[i].answer, verdict.final_answer)) {
      verdict.mode = VerdictMode::SelectedAgent;
      verdict.selected_index = static_cast<int>(i) + 1;
      break;
    }
  }
  if (answers_only && verdict.mode == VerdictMode::Synthesized) verdict.off_candidate = true;
  return verdict;
}

}  // namespace

std::string_view to_string(VerdictMode mode) {
  switch (mode) {
    case VerdictMode::SelectedAgent: return "selected_agent";
    case VerdictMode::Synthesized: return "synthesized";
    case VerdictMode::ShortCircuitIdentical: return "short_circuit_identical";
  }
  return "unknown";
}

VerdictMode verdict_mode_from_string(std::string_view name) {
  if (name == "selected_agent") return VerdictMode::SelectedAgent;
  if (name == "synthesized") return VerdictMode::Synthesized;
  if (name == "short_circuit_identical") return VerdictMode::ShortCircuitIdentical;
  throw std::invalid_argument("unknown verdict mode: " + std::string(name));
}

void to_json(nlohmann::json& j, const Verdict& v) {
  j = {{"final_answer", v.final_answer},   {"rationale", v.rationale},
       {"mode", to_string(v.mode)},        {"selected_index", v.selected_index},
       {"parse_attempts", v.parse_attempts}, {"judge_calls", v.judge_calls},
       {"parse_failed", v.parse_failed},   {"invalid_label", v.invalid_label},
       {"off_candidate", v.off_candidate}};
}

void from_json(const nlohmann::json& j, Verdict& v) {
  v.final_answer = j.at("final_answer").get<std::string>();
  v.rationale = j.value("rationale", std::string());
  v.mode = verdict_mode_from_string(j.at("mode").get<std::string>());
  v.selected_index = j.value("selected_index", 0);
  v.parse_attempts = j.value("parse_attempts", 0);
  v.judge_calls = j.value("judge_calls", 0);
  v.parse_failed = j.value("parse_failed", false);
  v.invalid_label = j.value("invalid_label", false);
  v.off_candidate = j.value("off_candidate", false);
}

void to_json(nlohmann::json& j, const DebateTranscript& t) {
  j = {{"arguments", t.arguments}, {"calls", t.calls}};
}

void from_json(const nlohmann::json& j, DebateTranscript& t) {
  t.arguments = j.at("arguments").get<std::vector<std::vector<std::string>>>();
  t.calls = j.value("calls", 0);
}

std::optional<Verdict> short_circuit(std::span<const CandidateAnswer> candidates) {
  if (candidates.empty()) return std::nullopt;
  for (const auto& c : candidates) {
    if (clean_answer(c.answer).empty()) return std::nullopt;
    if (!answers_match(c.answer, candidates.front().answer)) return std::nullopt;
  }
  Verdict v;
  v.final_answer = clean_answer(candidates.front().answer);
  v.mode = VerdictMode::ShortCircuitIdentical;
  return v;
}

std::optional<std::string> extract_complete(std::string_view completion) {
  static constexpr std::string_view kMarker = "Complete[";
  auto pos = completion.rfind(kMarker);
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = completion.substr(pos + kMarker.size());
  rest = rest.substr(0, rest.find('\n'));
  auto close = rest.rfind(']');
  if (close == std::string_view::npos) return std::nullopt;
  auto payload = clean_answer(rest.substr(0, close));
  if (payload.empty()) return std::nullopt;
  return payload;
}

std::optional<std::string> fever_label(std::string_view text) {
  static constexpr std::array<std::string_view, 3> kLabels = {kSupports, kRefutes, kNotEnoughInfo};
  auto upper = to_upper(clean_answer(text));
  while (!upper.empty() && (upper.back() == '.' || upper.back() == ' ')) upper.pop_back();
  for (auto label : kLabels) {
    if (upper == label) return std::string(label);
  }
  std::optional<std::string> best;
  std::size_t best_pos = 0;
  for (auto label : kLabels) {
    auto pos = upper.rfind(label);
    if (pos == std::string::npos) continue;
    if (!best || pos > best_pos) {
      best = std::string(label);
      best_pos = pos;
    }
  }
  return best;
}

std::string count_word(std::size_t n) {
  static constexpr std::array<std::string_view, 11> kWords = {
      "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};
  return n < kWords.size() ? std::string(kWords[n]) : std::to_string(n);
}

std::string render_solutions(std::span<const CandidateAnswer> candidates, bool swap_order) {
  std::string out;
  for (auto i : presentation_order(candidates.size(), swap_order)) {
    const auto& c = candidates[i];
    out += "Agent " + std::to_string(i + 1) + ":\n";
    out += render_trajectory(c.trajectory);
    out += "Final Answer: " + c.answer + "\n\n";
  }
  return out;
}

std::string render_answers_only(std::span<const CandidateAnswer> candidates, bool swap_order) {
  std::string out;
  for (auto i : presentation_order(candidates.size(), swap_order)) {
    out += "Agent " + std::to_string(i + 1) + "'s answer: " + candidates[i].answer + "\n";
  }
  return out + "\n";
}

std::string render_debate(const DebateTranscript& transcript) {
  std::string out = "Debate:\n\n";
  for (std::size_t r = 0; r < transcript.arguments.size(); ++r) {
    out += "Round " + std::to_string(r + 1) + "\n";
    for (std::size_t i = 0; i < transcript.arguments[r].size(); ++i) {
      out += "Agent " + std::to_string(i + 1) + ": " + trim(transcript.arguments[r][i]) + "\n\n";
    }
  }
  return out;
}

Verdict adjudicate_rc(const TaskSpec& task, std::span<const CandidateAnswer> candidates,
                      const LlmSession& llm, const JudgeConfig& config,
                      const DebateTranscript* debate, const PromptCatalog& catalog) {
  require_candidates(candidates);
  auto solutions = render_solutions(candidates, config.swap_order);
  if (debate) solutions += render_debate(*debate);
  auto name = config.template_override.empty() ? judge_prompt_name(task.dataset)
                                               : config.template_override;
  auto prompt = catalog.render(name, {{"count", count_word(candidates.size())},
                                      {"question", task.question},
                                      {"solutions", solutions}});
  return adjudicate(task, candidates, llm, config, prompt, false);
}

Verdict adjudicate_answers_only(const TaskSpec& task, std::span<const CandidateAnswer> candidates,
                                const LlmSession& llm, const JudgeConfig& config,
                                const PromptCatalog& catalog) {
  require_candidates(candidates);
  auto name = config.template_override.empty() ? std::string(kAnswersOnlyJudgePrompt)
                                               : config.template_override;
  auto prompt = catalog.render(name, {{"count", count_word(candidates.size())},
                                      {"question", task.question},
                                      {"solutions", render_answers_only(candidates, config.swap_order)}});
  return adjudicate(task, candidates, llm, config, prompt, true);
}

DebateTranscript run_debate(const TaskSpec& task, std::span<const CandidateAnswer> candidates,
                            const LlmSession& llm, const DebateConfig& config,
                            const PromptCatalog& catalog) {
  require_candidates(candidates);
  if (config.rounds < 1) throw std::invalid_argument("debate needs at least one round");
  const auto& tmpl = catalog.raw(std::string(kDebaterPrompt));

  DebateTranscript transcript;
  for (int round = 1; round <= config.rounds; ++round) {
    std::vector<std::future<std::string>> pending;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::string rebuttal;
      if (round > 1) {
        const auto& previous = transcript.arguments.back();
        rebuttal = "\nArguments from the other agents in the previous round:\n";
        for (std::size_t j = 0; j < previous.size(); ++j) {
          if (j == i) continue;
          rebuttal += "Agent " + std::to_string(j + 1) + ": " + trim(previous[j]) + "\n";
        }
        rebuttal += "\nAddress their arguments where they conflict with your evidence.\n";
      }
      CompletionRequest req;
      req.prompt = render_template(tmpl, {{"question", task.question},
                                          {"trajectory", render_trajectory(candidates[i].trajectory)},
                                          {"answer", candidates[i].answer},
                                          {"rebuttal", rebuttal}});
      req.temperature = config.temperature;
      req.max_tokens = config.max_tokens;
      req.label = config.label_prefix + std::to_string(i + 1);
      req.step = round;
      req.sample_index = config.sample_offset + static_cast<int>(i);
      pending.push_back(std::async(std::launch::async,
                                   [&llm, req = std::move(req)] { return llm.complete(req).text; }));
    }
    std::vector<std::string> arguments;
    for (auto& f : pending) arguments.push_back(f.get());
    transcript.calls += static_cast<int>(arguments.size());
    transcript.arguments.push_back(std::move(arguments));
  }
  return transcript;
}

}  // namespace rcourt
