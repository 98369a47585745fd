#include "rcourt/strategies.hpp"

#include "rcourt/errors.hpp"
#include "rcourt/evalkit.hpp"

#include <array>
#include <chrono>
#include <future>
#include <map>
#include <stdexcept>

namespace rcourt {

namespace {

constexpr std::array<std::pair<StrategyName, std::string_view>, 15> kNames = {{
    {StrategyName::Standard, "standard"},
    {StrategyName::CoT, "cot"},
    {StrategyName::CoTSC, "cot_sc"},
    {StrategyName::ReAct, "react"},
    {StrategyName::MAD, "mad"},
    {StrategyName::ReActThenCoTSC, "react_then_cot_sc"},
    {StrategyName::CoTSCThenReAct, "cot_sc_then_react"},
    {StrategyName::ReActThenSelfRefine, "react_then_self_refine"},
    {StrategyName::RC, "rc"},
    {StrategyName::RCWithoutJudge, "rc_without_judge"},
    {StrategyName::ReActSC, "react_sc"},
    {StrategyName::ReActThenMAD, "react_then_mad"},
    {StrategyName::ReActThenLLMJudge, "react_then_llm_judge"},
    {StrategyName::CoTThenJudge, "cot_then_judge"},
    {StrategyName::RCk, "rc_k"},
}};

bool rc_family(StrategyName name) {
  switch (name) {
    case StrategyName::RC:
    case StrategyName::RCk:
    case StrategyName::RCWithoutJudge:
    case StrategyName::ReActSC:
    case StrategyName::ReActThenMAD:
    case StrategyName::ReActThenLLMJudge: return true;
    default: return false;
  }
}

// Everything one strategy execution needs, shared by the building blocks.
struct Exec {
  const TaskSpec& task;
  const StrategySpec& spec;
  const StrategyContext& ctx;
  const LlmSession& llm;
  StrategyOutcome& out;
};

AgentConfig react_config(const Exec& x, std::string label, int sample_index, double temperature) {
  AgentConfig cfg;
  cfg.prompt_set = react_prompt_for(x.spec, x.task.dataset);
  cfg.template_override = x.spec.react_template;
  cfg.temperature = temperature;
  cfg.step_limit = x.spec.step_limit;
  cfg.agent_label = std::move(label);
  cfg.sample_index = x.spec.sample_offset + sample_index;
  cfg.max_tokens = x.spec.agent_max_tokens;
  return cfg;
}

AgentConfig cot_config(const Exec& x, std::string label, int sample_index, double temperature,
                       int call_step) {
  AgentConfig cfg;
  cfg.prompt_set = PromptSet::CoT;
  cfg.temperature = temperature;
  cfg.agent_label = std::move(label);
  cfg.sample_index = x.spec.sample_offset + sample_index;
  cfg.max_tokens = x.spec.agent_max_tokens;
  cfg.call_step = call_step;
  return cfg;
}

AgentResult react_agent(const Exec& x, const AgentConfig& cfg) {
  auto env = EnvSession::for_task(x.task, x.ctx.corpus);
  return run_react(x.task, env, cfg, x.llm, x.ctx.catalog);
}

// Runs `n` agents concurrently. A failing agent is recorded and dropped; when
// every agent fails the first error is rethrown.
template <typename Fn>
std::vector<CandidateAnswer> run_concurrently(const Exec& x, int n, const std::string& prefix, Fn fn) {
  std::vector<std::future<AgentResult>> pending;
  for (int i = 0; i < n; ++i) pending.push_back(std::async(std::launch::async, fn, i));

  std::vector<CandidateAnswer> candidates;
  std::exception_ptr first_error;
  for (int i = 0; i < n; ++i) {
    try {
      candidates.push_back(pending[static_cast<std::size_t>(i)].get().candidate);
    } catch (const std::exception& e) {
      if (!first_error) first_error = std::current_exception();
      x.out.agent_failures.push_back(prefix + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (candidates.empty() && first_error) std::rethrow_exception(first_error);
  return candidates;
}

std::vector<CandidateAnswer> react_agents(const Exec& x, int n, double temperature) {
  return run_concurrently(x, n, "agent-", [&x, temperature](int i) {
    return react_agent(x, react_config(x, "agent-" + std::to_string(i + 1), i, temperature));
  });
}

std::vector<CandidateAnswer> cot_agents(const Exec& x, int n, double temperature) {
  return run_concurrently(x, n, "cot-", [&x, temperature](int i) {
    return run_cot(x.task, cot_config(x, "cot-" + std::to_string(i + 1), i, temperature, 1), x.llm,
                   x.ctx.catalog);
  });
}

VoteResult vote_over(const std::vector<CandidateAnswer>& candidates) {
  std::vector<std::string> answers;
  for (const auto& c : candidates) answers.push_back(c.answer);
  return majority_vote(answers);
}

// Self-consistency over CoT samples. Samples share one label and are told
// apart by step (and sample index).
VoteResult cot_sc(const Exec& x, std::vector<CandidateAnswer>& samples) {
  std::vector<std::future<AgentResult>> pending;
  for (int s = 0; s < x.spec.cot_sc_samples; ++s) {
    pending.push_back(std::async(std::launch::async, [&x, s] {
      return run_cot(x.task, cot_config(x, "cot-sc", s, x.spec.sc_temperature, s + 1), x.llm,
                     x.ctx.catalog);
    }));
  }
  for (auto& f : pending) samples.push_back(f.get().candidate);
  return vote_over(samples);
}

JudgeConfig judge_config(const Exec& x) {
  JudgeConfig cfg;
  cfg.max_tokens = x.spec.judge_max_tokens;
  cfg.swap_order = x.spec.judge_swap_order;
  return cfg;
}

DebateConfig debate_config(const Exec& x) {
  DebateConfig cfg;
  cfg.rounds = x.spec.debate_rounds;
  cfg.temperature = x.spec.temperature;
  cfg.max_tokens = x.spec.agent_max_tokens;
  cfg.sample_offset = x.spec.sample_offset;
  return cfg;
}

void set_verdict(const Exec& x, Verdict verdict) {
  x.out.final_answer = verdict.final_answer;
  x.out.verdict = std::move(verdict);
}

// Short-circuit, otherwise the trajectory-reading judge (optionally after a
// debate).
void judge_candidates(const Exec& x, bool debate_first) {
  const auto& candidates = x.out.candidates;
  if (auto v = short_circuit(candidates)) {
    set_verdict(x, std::move(*v));
    return;
  }
  if (debate_first) {
    x.out.debate = run_debate(x.task, candidates, x.llm, debate_config(x), x.ctx.catalog);
  }
  set_verdict(x, adjudicate_rc(x.task, candidates, x.llm, judge_config(x),
                               x.out.debate ? &*x.out.debate : nullptr, x.ctx.catalog));
}

// --- strategy bodies --------------------------------------------------------

void standard(const Exec& x) {
  AgentConfig cfg;
  cfg.prompt_set = x.spec.standard_concise ? PromptSet::Standard : PromptSet::StandardNoConciseness;
  cfg.temperature = x.spec.temperature;
  cfg.agent_label = "standard";
  cfg.sample_index = x.spec.sample_offset;
  cfg.max_tokens = x.spec.agent_max_tokens;
  auto r = run_standard(x.task, cfg, x.llm, x.ctx.catalog);
  x.out.final_answer = r.candidate.answer;
  x.out.candidates.push_back(std::move(r.candidate));
}

void cot(const Exec& x) {
  auto r = run_cot(x.task, cot_config(x, "cot-1", 0, x.spec.temperature, 1), x.llm, x.ctx.catalog);
  x.out.final_answer = r.candidate.answer;
  x.out.candidates.push_back(std::move(r.candidate));
}

void cot_sc_only(const Exec& x) {
  auto vote = cot_sc(x, x.out.candidates);
  x.out.final_answer = vote.winner;
  x.out.vote = vote;
}

void react(const Exec& x) {
  auto r = react_agent(x, react_config(x, "agent-1", 0, x.spec.temperature));
  x.out.final_answer = r.candidate.answer;
  x.out.candidates.push_back(std::move(r.candidate));
}

void react_then_cot_sc(const Exec& x) {
  react(x);
  if (!x.out.final_answer.empty()) return;
  x.out.fallback = "cot_sc";
  std::vector<CandidateAnswer> samples;
  auto vote = cot_sc(x, samples);
  x.out.vote = vote;
  x.out.final_answer = vote.winner;
  for (auto& s : samples) x.out.candidates.push_back(std::move(s));
}

void cot_sc_then_react(const Exec& x) {
  auto vote = cot_sc(x, x.out.candidates);
  x.out.vote = vote;
  x.out.final_answer = vote.winner;
  if (vote.frequency >= x.spec.vote_threshold) return;
  x.out.fallback = "react";
  auto r = react_agent(x, react_config(x, "agent-1", 0, x.spec.temperature));
  if (!r.candidate.answer.empty()) x.out.final_answer = r.candidate.answer;
  x.out.candidates.push_back(std::move(r.candidate));
}

std::string parse_revision(const std::string& completion) {
  if (auto a = extract_cot_answer(completion)) return *a;
  std::string last;
  std::size_t start = 0;
  while (start <= completion.size()) {
    auto end = completion.find('\n', start);
    auto line = trim(std::string_view(completion).substr(start, end == std::string::npos ? end : end - start));
    if (!line.empty()) last = line;
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return clean_answer(last);
}

void react_self_refine(const Exec& x) {
  react(x);
  const auto& trajectory = x.out.candidates.front().trajectory;
  auto transcript = render_trajectory(trajectory);
  std::string answer = x.out.final_answer;
  int step = 0;
  for (int round = 1; round <= x.spec.refine_rounds; ++round) {
    std::map<std::string, std::string> vars = {
        {"question", x.task.question}, {"trajectory", transcript}, {"answer", answer}};
    CompletionRequest req;
    req.temperature = x.spec.temperature;
    req.max_tokens = x.spec.agent_max_tokens;
    req.sample_index = x.spec.sample_offset;
    req.label = "refine";

    req.prompt = x.ctx.catalog.render(std::string(kRefineFeedbackPrompt), vars);
    req.step = ++step;
    Refinement r;
    r.feedback = x.llm.complete(req).text;

    vars["feedback"] = trim(r.feedback);
    req.prompt = x.ctx.catalog.render(std::string(kRefineRevisePrompt), vars);
    req.step = ++step;
    r.revision = x.llm.complete(req).text;
    r.answer = parse_revision(r.revision);

    bool same = answers_match(r.answer, answer);
    answer = r.answer;
    x.out.refinements.push_back(std::move(r));
    if (same) {
      x.out.converged = true;
      break;
    }
  }
  x.out.final_answer = answer;
}

void rc(const Exec& x, int agents, double temperature) {
  x.out.candidates = react_agents(x, agents, temperature);
  judge_candidates(x, false);
}

void react_sc(const Exec& x) {
  x.out.candidates = react_agents(x, x.spec.react_sc_agents, x.spec.react_sc_temperature);
  auto vote = vote_over(x.out.candidates);
  x.out.vote = vote;
  x.out.final_answer = vote.winner;
}

void react_then_mad(const Exec& x) {
  x.out.candidates = react_agents(x, x.spec.rc_agents, x.spec.temperature);
  judge_candidates(x, true);
}

void react_then_llm_judge(const Exec& x) {
  x.out.candidates = react_agents(x, x.spec.rc_agents, x.spec.temperature);
  if (auto v = short_circuit(x.out.candidates)) {
    set_verdict(x, std::move(*v));
    return;
  }
  set_verdict(x, adjudicate_answers_only(x.task, x.out.candidates, x.llm, judge_config(x),
                                         x.ctx.catalog));
}

void cot_then_judge(const Exec& x) {
  x.out.candidates = cot_agents(x, 2, x.spec.temperature);
  judge_candidates(x, false);
}

void mad(const Exec& x) {
  x.out.candidates = cot_agents(x, 2, x.spec.temperature);
  x.out.debate = run_debate(x.task, x.out.candidates, x.llm, debate_config(x), x.ctx.catalog);
  set_verdict(x, adjudicate_rc(x.task, x.out.candidates, x.llm, judge_config(x), &*x.out.debate,
                               x.ctx.catalog));
}

StrategyOutcome execute(const TaskSpec& task, const StrategySpec& spec, const StrategyContext& ctx) {
  validate(task);
  CallLedger ledger(ctx.gateway.mode());
  LlmSession llm(ctx.gateway, ledger, task.id);
  StrategyOutcome out;
  Exec x{task, spec, ctx, llm, out};
  auto start = std::chrono::steady_clock::now();

  switch (spec.name) {
    case StrategyName::Standard: standard(x); break;
    case StrategyName::CoT: cot(x); break;
    case StrategyName::CoTSC: cot_sc_only(x); break;
    case StrategyName::ReAct: react(x); break;
    case StrategyName::MAD: mad(x); break;
    case StrategyName::ReActThenCoTSC: react_then_cot_sc(x); break;
    case StrategyName::CoTSCThenReAct: cot_sc_then_react(x); break;
    case StrategyName::ReActThenSelfRefine: react_self_refine(x); break;
    case StrategyName::RC: rc(x, spec.rc_agents, spec.temperature); break;
    case StrategyName::RCWithoutJudge: react(x); break;
    case StrategyName::ReActSC: react_sc(x); break;
    case StrategyName::ReActThenMAD: react_then_mad(x); break;
    case StrategyName::ReActThenLLMJudge: react_then_llm_judge(x); break;
    case StrategyName::CoTThenJudge: cot_then_judge(x); break;
    case StrategyName::RCk: rc(x, spec.k, spec.rc_k_temperature); break;
  }

  ledger.set_wall_time(std::chrono::steady_clock::now() - start);
  out.ledger = ledger.snapshot();
  return out;
}

StrategyOutcome run_named(StrategyName name, const TaskSpec& task, const StrategySpec& spec,
                          const StrategyContext& ctx) {
  auto copy = spec;
  copy.name = name;
  return execute(task, copy, ctx);
}

double read_double(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("strategy parameter " + key + " must be a number");
  return v.get<double>();
}

int read_int(const nlohmann::json& v, const std::string& key, int min) {
  if (!v.is_number_integer()) throw ConfigError("strategy parameter " + key + " must be an integer");
  int value = v.get<int>();
  if (value < min) {
    throw ConfigError("strategy parameter " + key + " must be at least " + std::to_string(min));
  }
  return value;
}

double read_temperature(const nlohmann::json& v, const std::string& key) {
  double t = read_double(v, key);
  if (t < 0.0) throw ConfigError("strategy parameter " + key + " must be non-negative");
  return t;
}

}  // namespace

std::string_view to_string(StrategyName name) {
  for (const auto& [n, s] : kNames) {
    if (n == name) return s;
  }
  return "unknown";
}

StrategyName strategy_from_string(std::string_view name) {
  auto lowered = to_lower(name);
  for (const auto& [n, s] : kNames) {
    if (s == lowered) return n;
  }
  throw ConfigError("unknown strategy: " + std::string(name));
}

std::vector<StrategyName> all_strategies() {
  std::vector<StrategyName> out;
  for (const auto& [n, _] : kNames) out.push_back(n);
  return out;
}

bool uses_retrieval(StrategyName name) {
  switch (name) {
    case StrategyName::Standard:
    case StrategyName::CoT:
    case StrategyName::CoTSC:
    case StrategyName::MAD:
    case StrategyName::CoTThenJudge: return false;
    default: return true;
  }
}

StrategySpec strategy_spec_from_json(StrategyName name, const nlohmann::json& params) {
  StrategySpec spec;
  spec.name = name;
  if (params.is_null()) return spec;
  if (!params.is_object()) throw ConfigError("strategy parameters must be an object");
  for (const auto& [key, v] : params.items()) {
    if (key == "rc_agents") spec.rc_agents = read_int(v, key, 1);
    else if (key == "k") spec.k = read_int(v, key, 2);
    else if (key == "temperature") spec.temperature = read_temperature(v, key);
    else if (key == "cot_sc_samples") spec.cot_sc_samples = read_int(v, key, 1);
    else if (key == "sc_temperature") spec.sc_temperature = read_temperature(v, key);
    else if (key == "vote_threshold") {
      spec.vote_threshold = read_double(v, key);
      if (spec.vote_threshold < 0.0 || spec.vote_threshold > 1.0) {
        throw ConfigError("vote_threshold must lie in [0, 1]");
      }
    } else if (key == "react_sc_agents") spec.react_sc_agents = read_int(v, key, 1);
    else if (key == "react_sc_temperature") spec.react_sc_temperature = read_temperature(v, key);
    else if (key == "rc_k_temperature") spec.rc_k_temperature = read_temperature(v, key);
    else if (key == "debate_rounds") spec.debate_rounds = read_int(v, key, 1);
    else if (key == "refine_rounds") spec.refine_rounds = read_int(v, key, 1);
    else if (key == "react_prompt") {
      if (!v.is_string()) throw ConfigError("react_prompt must be a string");
      auto set = prompt_set_from_string(v.get<std::string>());
      if (set != PromptSet::ReActDefault && set != PromptSet::FeverReasoningEnhanced) {
        throw ConfigError("react_prompt must be 'react' or 'react_enhanced'");
      }
      spec.react_prompt = set;
    } else if (key == "react_template") {
      if (!v.is_string()) throw ConfigError("react_template must be a string");
      spec.react_template = v.get<std::string>();
    } else if (key == "standard_concise") {
      if (!v.is_boolean()) throw ConfigError("standard_concise must be a boolean");
      spec.standard_concise = v.get<bool>();
    } else if (key == "judge_swap_order") {
      if (!v.is_boolean()) throw ConfigError("judge_swap_order must be a boolean");
      spec.judge_swap_order = v.get<bool>();
    } else if (key == "agent_max_tokens") spec.agent_max_tokens = read_int(v, key, 1);
    else if (key == "judge_max_tokens") spec.judge_max_tokens = read_int(v, key, 1);
    else if (key == "step_limit") spec.step_limit = read_int(v, key, 1);
    else if (key == "sample_offset") spec.sample_offset = read_int(v, key, 0);
    else throw ConfigError("unknown strategy parameter: " + key);
  }
  return spec;
}

nlohmann::json strategy_spec_to_json(const StrategySpec& s) {
  nlohmann::json j = {{"name", to_string(s.name)},
                      {"rc_agents", s.rc_agents},
                      {"k", s.k},
                      {"temperature", s.temperature},
                      {"cot_sc_samples", s.cot_sc_samples},
                      {"sc_temperature", s.sc_temperature},
                      {"vote_threshold", s.vote_threshold},
                      {"react_sc_agents", s.react_sc_agents},
                      {"react_sc_temperature", s.react_sc_temperature},
                      {"rc_k_temperature", s.rc_k_temperature},
                      {"debate_rounds", s.debate_rounds},
                      {"refine_rounds", s.refine_rounds},
                      {"react_template", s.react_template},
                      {"standard_concise", s.standard_concise},
                      {"judge_swap_order", s.judge_swap_order},
                      {"agent_max_tokens", s.agent_max_tokens},
                      {"judge_max_tokens", s.judge_max_tokens},
                      {"step_limit", s.step_limit},
                      {"sample_offset", s.sample_offset}};
  j["react_prompt"] = s.react_prompt ? nlohmann::json(to_string(*s.react_prompt)) : nlohmann::json(nullptr);
  return j;
}

PromptSet react_prompt_for(const StrategySpec& spec, Dataset dataset) {
  if (spec.react_prompt) return *spec.react_prompt;
  if (dataset == Dataset::FEVER && rc_family(spec.name)) return PromptSet::FeverReasoningEnhanced;
  return PromptSet::ReActDefault;
}

void validate_strategy(const StrategySpec& spec, Dataset dataset, const PromptCatalog& catalog) {
  if (!uses_retrieval(spec.name)) {
    auto set = spec.standard_concise ? PromptSet::Standard : PromptSet::StandardNoConciseness;
    auto name = spec.name == StrategyName::Standard ? agent_prompt_name(set, dataset)
                                                    : agent_prompt_name(PromptSet::CoT, dataset);
    if (!catalog.contains(name)) throw ConfigError("missing prompt template " + name);
    return;
  }
  std::string name = spec.react_template;
  if (name.empty()) name = agent_prompt_name(react_prompt_for(spec, dataset), dataset);
  if (!catalog.contains(name)) throw ConfigError("missing prompt template " + name);
  if (auto written_for = template_dataset(name); written_for && *written_for != dataset) {
    throw ConfigError("prompt template " + name + " is written for " +
                      std::string(to_string(*written_for)) + ", not " + std::string(to_string(dataset)));
  }
  if (spec.name == StrategyName::CoTSCThenReAct || spec.name == StrategyName::ReActThenCoTSC) {
    if (!catalog.contains(agent_prompt_name(PromptSet::CoT, dataset))) {
      throw ConfigError("missing CoT prompt template for " + std::string(to_string(dataset)));
    }
  }
}

VoteResult majority_vote(std::span<const std::string> answers) {
  if (answers.empty()) throw EmptyInput("majority_vote needs at least one answer");
  std::vector<std::string> order;  // normalized classes in first-seen order
  std::map<std::string, std::pair<int, std::string>> tally;  // class -> (count, first original)
  for (const auto& a : answers) {
    auto key = normalized_text(a);
    if (key.empty()) continue;
    auto [it, inserted] = tally.try_emplace(key, 0, clean_answer(a));
    if (inserted) order.push_back(key);
    ++it->second.first;
  }
  VoteResult result;
  result.total = static_cast<int>(answers.size());
  for (const auto& key : order) {
    const auto& [count, original] = tally[key];
    if (count > result.votes) {
      result.votes = count;
      result.winner = original;
    }
  }
  result.frequency = static_cast<double>(result.votes) / static_cast<double>(result.total);
  return result;
}

nlohmann::json outcome_extras(const StrategyOutcome& o) {
  nlohmann::json j = nlohmann::json::object();
  if (o.vote) {
    j["vote"] = {{"winner", o.vote->winner},
                 {"frequency", o.vote->frequency},
                 {"votes", o.vote->votes},
                 {"total", o.vote->total}};
  }
  if (o.debate) j["debate"] = *o.debate;
  if (!o.refinements.empty()) {
    auto& arr = j["refinements"] = nlohmann::json::array();
    for (const auto& r : o.refinements) {
      arr.push_back({{"feedback", r.feedback}, {"revision", r.revision}, {"answer", r.answer}});
    }
    j["converged"] = o.converged;
  }
  if (!o.agent_failures.empty()) j["agent_failures"] = o.agent_failures;
  return j;
}

StrategyOutcome run_strategy(const TaskSpec& task, const StrategySpec& spec,
                             const StrategyContext& ctx) {
  return execute(task, spec, ctx);
}

StrategyOutcome run_rc(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::RC, t, s, c);
}
StrategyOutcome run_rc_k(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::RCk, t, s, c);
}
StrategyOutcome run_react_then_cotsc(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::ReActThenCoTSC, t, s, c);
}
StrategyOutcome run_cotsc_then_react(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::CoTSCThenReAct, t, s, c);
}
StrategyOutcome run_react_self_refine(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::ReActThenSelfRefine, t, s, c);
}
StrategyOutcome run_react_sc(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::ReActSC, t, s, c);
}
StrategyOutcome run_react_then_mad(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::ReActThenMAD, t, s, c);
}
StrategyOutcome run_react_then_llm_judge(const TaskSpec& t, const StrategySpec& s,
                                         const StrategyContext& c) {
  return run_named(StrategyName::ReActThenLLMJudge, t, s, c);
}
StrategyOutcome run_cot_then_judge(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::CoTThenJudge, t, s, c);
}
StrategyOutcome run_mad(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::MAD, t, s, c);
}
StrategyOutcome run_rc_without_judge(const TaskSpec& t, const StrategySpec& s, const StrategyContext& c) {
  return run_named(StrategyName::RCWithoutJudge, t, s, c);
}

}  // namespace rcourt
