#pragma once

// Adjudication over candidate answers: the trajectory-reading judge, the
// answers-only judge and multi-agent debate.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcourt/core.hpp"
#include "rcourt/llm_gateway.hpp"
#include "rcourt/prompts.hpp"

namespace rcourt {

enum class VerdictMode { SelectedAgent, Synthesized, ShortCircuitIdentical };

std::string_view to_string(VerdictMode mode);
VerdictMode verdict_mode_from_string(std::string_view name);

struct Verdict {
  std::string final_answer;
  std::string rationale;  // raw judge completion(s)
  VerdictMode mode = VerdictMode::Synthesized;
  int selected_index = 0;  // 1-based agent label; 0 unless SelectedAgent
  int parse_attempts = 0;
  int judge_calls = 0;
  bool parse_failed = false;   // no Complete[...] even after the retry
  bool invalid_label = false;  // FEVER answer outside the label set
  bool off_candidate = false;  // answers-only judge named no candidate

  bool operator==(const Verdict&) const = default;
};

void to_json(nlohmann::json& j, const Verdict& verdict);
void from_json(const nlohmann::json& j, Verdict& verdict);

struct JudgeConfig {
  double temperature = kGreedyTemperature;
  int max_tokens = kJudgeMaxTokens;
  std::string label = "judge";
  // Present candidates last-to-first; the "Agent i" labels do not move.
  bool swap_order = false;
  std::string template_override;
};

struct DebateConfig {
  int rounds = 2;
  double temperature = kGreedyTemperature;
  int max_tokens = kAgentMaxTokens;
  std::string label_prefix = "debater-";
  // Debater i uses sample_offset + i, so debaters holding the same answer
  // never share a cache entry.
  int sample_offset = 0;
};

struct DebateTranscript {
  // arguments[round][agent]
  std::vector<std::vector<std::string>> arguments;
  int calls = 0;

  bool operator==(const DebateTranscript&) const = default;
};

void to_json(nlohmann::json& j, const DebateTranscript& transcript);
void from_json(const nlohmann::json& j, DebateTranscript& transcript);

// A verdict when every answer is non-empty and all of them match; no
// completion is consumed.
std::optional<Verdict> short_circuit(std::span<const CandidateAnswer> candidates);

// Payload of the last "Complete[" occurrence, up to the final ']' on that
// line, cleaned. nullopt when absent or empty.
std::optional<std::string> extract_complete(std::string_view completion);

// FEVER label from free text: exact label after uppercasing and dropping a
// trailing period, else the label occurring last in the text.
std::optional<std::string> fever_label(std::string_view text);

std::string count_word(std::size_t n);

std::string render_solutions(std::span<const CandidateAnswer> candidates, bool swap_order);
std::string render_answers_only(std::span<const CandidateAnswer> candidates, bool swap_order);
std::string render_debate(const DebateTranscript& transcript);

inline constexpr std::string_view kRestateInstruction =
    "\n\nYour reply did not end with the required line. State your final answer again, on its "
    "own line, in exactly this format:\nAction: Complete[<answer>].";

Verdict adjudicate_rc(const TaskSpec& task, std::span<const CandidateAnswer> candidates,
                      const LlmSession& llm, const JudgeConfig& config = {},
                      const DebateTranscript* debate = nullptr,
                      const PromptCatalog& catalog = PromptCatalog::builtin());

Verdict adjudicate_answers_only(const TaskSpec& task, std::span<const CandidateAnswer> candidates,
                                const LlmSession& llm, const JudgeConfig& config = {},
                                const PromptCatalog& catalog = PromptCatalog::builtin());

// One completion per agent per round. From round 2 each agent also sees the
// other agents' arguments from the previous round.
DebateTranscript run_debate(const TaskSpec& task, std::span<const CandidateAnswer> candidates,
                            const LlmSession& llm, const DebateConfig& config = {},
                            const PromptCatalog& catalog = PromptCatalog::builtin());

}  // namespace rcourt
