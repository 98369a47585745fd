#pragma once

// Named compositions of agents, environments and judges: RC, RC-k and every
// baseline and ablation the report tables compare.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcourt/agent.hpp"
#include "rcourt/core.hpp"
#include "rcourt/judge.hpp"
#include "rcourt/llm_gateway.hpp"
#include "rcourt/prompts.hpp"
#include "rcourt/retrieval_env.hpp"

namespace rcourt {

enum class StrategyName {
  Standard,
  CoT,
  CoTSC,
  ReAct,
  MAD,
  ReActThenCoTSC,
  CoTSCThenReAct,
  ReActThenSelfRefine,
  RC,
  RCWithoutJudge,
  ReActSC,
  ReActThenMAD,
  ReActThenLLMJudge,
  CoTThenJudge,
  RCk,
};

std::string_view to_string(StrategyName name);
// Throws ConfigError.
StrategyName strategy_from_string(std::string_view name);
std::vector<StrategyName> all_strategies();

// True when the strategy runs ReAct agents and therefore needs an environment.
bool uses_retrieval(StrategyName name);

struct StrategySpec {
  StrategyName name = StrategyName::RC;
  int rc_agents = 2;
  int k = 3;  // agents for RC-k
  double temperature = kGreedyTemperature;
  int cot_sc_samples = 21;
  double sc_temperature = kSamplingTemperature;
  double vote_threshold = 0.5;  // CoT-SC -> ReAct falls back below this
  int react_sc_agents = 3;
  double react_sc_temperature = kSamplingTemperature;
  double rc_k_temperature = kSamplingTemperature;
  int debate_rounds = 2;
  int refine_rounds = 1;
  // nullopt: FeverReasoningEnhanced for RC-family strategies on FEVER,
  // ReActDefault everywhere else.
  std::optional<PromptSet> react_prompt;
  std::string react_template;  // explicit template name, overrides react_prompt
  bool standard_concise = true;
  bool judge_swap_order = false;
  int agent_max_tokens = kAgentMaxTokens;
  int judge_max_tokens = kJudgeMaxTokens;
  int step_limit = 0;     // 0: the task's own limit
  int sample_offset = 0;  // added to every sample index (distinct runs)
};

// Reads overrides from a JSON object; unknown keys and out-of-range values
// raise ConfigError.
StrategySpec strategy_spec_from_json(StrategyName name, const nlohmann::json& params);
nlohmann::json strategy_spec_to_json(const StrategySpec& spec);

PromptSet react_prompt_for(const StrategySpec& spec, Dataset dataset);

// Rejects strategy/dataset pairings that cannot run, e.g. a MuSiQue ReAct
// template on FEVER or the enhanced prompt outside FEVER.
void validate_strategy(const StrategySpec& spec, Dataset dataset, const PromptCatalog& catalog);

struct VoteResult {
  std::string winner;
  double frequency = 0.0;
  int votes = 0;  // ballots for the winner
  int total = 0;  // all ballots, empty answers included

  bool operator==(const VoteResult&) const = default;
};

// Answers are pooled under the scoring normalizer. Empty answers cast no vote
// but count toward the total. Ties go to the answer seen first. Throws
// EmptyInput.
VoteResult majority_vote(std::span<const std::string> answers);

struct Refinement {
  std::string feedback;
  std::string revision;  // raw completion
  std::string answer;
};

struct StrategyOutcome {
  std::string final_answer;
  std::optional<Verdict> verdict;
  std::vector<CandidateAnswer> candidates;
  LedgerSnapshot ledger;
  std::optional<std::string> fallback;  // "react" or "cot_sc" when taken
  std::optional<VoteResult> vote;
  std::optional<DebateTranscript> debate;
  std::vector<Refinement> refinements;
  bool converged = false;
  std::vector<std::string> agent_failures;
};

// Strategy-specific details for a record's "extras" field.
nlohmann::json outcome_extras(const StrategyOutcome& outcome);

struct StrategyContext {
  const LlmGateway& gateway;
  std::shared_ptr<const Corpus> corpus;  // may be null for MuSiQue or retrieval-free strategies
  const PromptCatalog& catalog = PromptCatalog::builtin();
};

StrategyOutcome run_strategy(const TaskSpec& task, const StrategySpec& spec,
                             const StrategyContext& ctx);

// Direct entry points; each is run_strategy with the matching name.
StrategyOutcome run_rc(const TaskSpec& task, const StrategySpec& spec, const StrategyContext& ctx);
StrategyOutcome run_rc_k(const TaskSpec& task, const StrategySpec& spec, const StrategyContext& ctx);
StrategyOutcome run_react_then_cotsc(const TaskSpec& task, const StrategySpec& spec,
                                     const StrategyContext& ctx);
StrategyOutcome run_cotsc_then_react(const TaskSpec& task, const StrategySpec& spec,
                                     const StrategyContext& ctx);
StrategyOutcome run_react_self_refine(const TaskSpec& task, const StrategySpec& spec,
                                      const StrategyContext& ctx);
StrategyOutcome run_react_sc(const TaskSpec& task, const StrategySpec& spec,
                             const StrategyContext& ctx);
StrategyOutcome run_react_then_mad(const TaskSpec& task, const StrategySpec& spec,
                                   const StrategyContext& ctx);
StrategyOutcome run_react_then_llm_judge(const TaskSpec& task, const StrategySpec& spec,
                                         const StrategyContext& ctx);
StrategyOutcome run_cot_then_judge(const TaskSpec& task, const StrategySpec& spec,
                                   const StrategyContext& ctx);
StrategyOutcome run_mad(const TaskSpec& task, const StrategySpec& spec, const StrategyContext& ctx);
StrategyOutcome run_rc_without_judge(const TaskSpec& task, const StrategySpec& spec,
                                     const StrategyContext& ctx);

}  // namespace rcourt
