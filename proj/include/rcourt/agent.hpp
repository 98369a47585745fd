#pragma once

// Single-agent procedures: the ReAct loop, one-shot CoT and Standard prompting.

#include <optional>
#include <string>
#include <vector>

#include "rcourt/core.hpp"
#include "rcourt/llm_gateway.hpp"
#include "rcourt/prompts.hpp"
#include "rcourt/retrieval_env.hpp"

namespace rcourt {

struct AgentConfig {
  PromptSet prompt_set = PromptSet::ReActDefault;
  double temperature = kGreedyTemperature;
  int step_limit = 0;  // 0: the task's limit
  std::string agent_label = "agent-1";
  int sample_index = 0;
  int max_tokens = kAgentMaxTokens;
  // Replaces the template chosen from (prompt_set, dataset) when non-empty.
  std::string template_override;
  // Step number reported to the backend by single-shot procedures.
  int call_step = 1;
};

struct AgentResult {
  CandidateAnswer candidate;
  int calls_used = 0;
  int malformed_count = 0;
};

inline const std::vector<std::string> kReActStop = {"\nObservation"};
inline const std::vector<std::string> kSingleShotStop = {"\nQuestion:", "\nClaim:"};

// Cuts `text` at the earliest occurrence of any stop sequence. Backends that
// ignore stop sequences (scripted replays) are thereby held to the same
// contract as remote ones.
std::string apply_stop(std::string text, const std::vector<std::string>& stop);

struct ParsedStep {
  std::string thought;
  std::string action_text;  // text following the Action label, first line
  std::optional<Action> action;
};

// Splits one ReAct completion into thought and action. A repeated
// "Thought i:" prefix is dropped; the thought is everything before the first
// "Action i:" label.
ParsedStep parse_react_completion(std::string_view completion, Dataset dataset);

// Text after the last "Answer:" label up to the end of that line, cleaned.
// nullopt when there is no label or nothing follows it.
std::optional<std::string> extract_cot_answer(std::string_view completion);

std::string react_prompt(const TaskSpec& task, const Trajectory& trajectory, int next_step,
                         const std::string& template_name, const PromptCatalog& catalog);

std::string resolve_agent_template(const TaskSpec& task, const AgentConfig& config);

AgentResult run_react(const TaskSpec& task, EnvSession& env, const AgentConfig& config,
                      const LlmSession& llm, const PromptCatalog& catalog = PromptCatalog::builtin());

AgentResult run_cot(const TaskSpec& task, const AgentConfig& config, const LlmSession& llm,
                    const PromptCatalog& catalog = PromptCatalog::builtin());

AgentResult run_standard(const TaskSpec& task, const AgentConfig& config, const LlmSession& llm,
                         const PromptCatalog& catalog = PromptCatalog::builtin());

}  // namespace rcourt
