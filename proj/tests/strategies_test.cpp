#include <gtest/gtest.h>

#include <mutex>
#include <set>

#include "rcourt/errors.hpp"
#include "rcourt/strategies.hpp"
#include "support/fixtures.hpp"

namespace rcourt {
namespace {

using testing::fixture_corpus;

using Responder = std::function<std::string(const CompletionRequest&)>;

// Gateway over a recording callback backend plus a strategy context.
struct Rig {
  explicit Rig(Responder fn)
      : backend(std::make_shared<CallbackBackend>([this, fn](const CompletionRequest& r) {
          {
            std::lock_guard lock(mutex);
            requests.push_back(r);
          }
          return fn(r);
        })),
        gateway(backend, "test-model"),
        ctx{gateway, fixture_corpus()} {}

  std::size_t count_label(const std::string& prefix) {
    std::lock_guard lock(mutex);
    return static_cast<std::size_t>(std::count_if(requests.begin(), requests.end(), [&](const auto& r) {
      return r.label.starts_with(prefix);
    }));
  }

  std::mutex mutex;
  std::vector<CompletionRequest> requests;
  std::shared_ptr<CompletionBackend> backend;
  LlmGateway gateway;
  StrategyContext ctx;
};

// A ReAct agent that searches until `finish_at`, then answers.
std::string react_reply(const CompletionRequest& r, int finish_at, const std::string& answer) {
  if (r.step < finish_at) return " Keep going.\nAction " + std::to_string(r.step) + ": Search[Richard Nixon]";
  return " Done.\nAction " + std::to_string(r.step) + ": Finish[" + answer + "]";
}

int agent_number(const CompletionRequest& r) { return std::stoi(r.label.substr(r.label.rfind('-') + 1)); }

StrategySpec spec_for(StrategyName name) {
  StrategySpec s;
  s.name = name;
  return s;
}

TaskSpec question() { return testing::hotpot("q", "Who was Milhouse named after?", "Richard Nixon"); }

// --- majority vote ------------------------------------------------------------

std::vector<std::string> ballots(std::initializer_list<std::pair<std::string, int>> counts) {
  std::vector<std::string> out;
  for (const auto& [answer, n] : counts) out.insert(out.end(), static_cast<std::size_t>(n), answer);
  return out;
}

TEST(MajorityVote, PluralityBelowHalf) {
  auto v = majority_vote(ballots({{"Alpha", 10}, {"Beta", 7}, {"Gamma", 4}}));
  EXPECT_EQ(v.winner, "Alpha");
  EXPECT_EQ(v.votes, 10);
  EXPECT_EQ(v.total, 21);
  EXPECT_DOUBLE_EQ(v.frequency, 10.0 / 21.0);
  EXPECT_LT(v.frequency, 0.5);
}

TEST(MajorityVote, MajorityAboveHalf) {
  auto v = majority_vote(ballots({{"Beta", 11}, {"Alpha", 10}}));
  EXPECT_EQ(v.winner, "Beta");
  EXPECT_DOUBLE_EQ(v.frequency, 11.0 / 21.0);
}

TEST(MajorityVote, UnanimousIsOne) {
  EXPECT_DOUBLE_EQ(majority_vote(ballots({{"Paris", 21}})).frequency, 1.0);
}

TEST(MajorityVote, EmptyInputRaises) {
  std::vector<std::string> none;
  EXPECT_THROW(majority_vote(none), EmptyInput);
}

TEST(MajorityVote, EmptyAnswersCountInTotalOnly) {
  auto v = majority_vote(std::vector<std::string>{"", "", "Alpha"});
  EXPECT_EQ(v.winner, "Alpha");
  EXPECT_EQ(v.total, 3);
  EXPECT_DOUBLE_EQ(v.frequency, 1.0 / 3.0);
  auto blank = majority_vote(std::vector<std::string>{"", " "});
  EXPECT_EQ(blank.winner, "");
  EXPECT_EQ(blank.frequency, 0.0);
}

TEST(MajorityVote, TiesGoToFirstSeenAndNormalizedAnswersPool) {
  EXPECT_EQ(majority_vote(std::vector<std::string>{"Beta", "Alpha", "Alpha", "Beta"}).winner, "Beta");
  auto v = majority_vote(std::vector<std::string>{"The Paris", "paris", "Lyon"});
  EXPECT_EQ(v.winner, "The Paris");
  EXPECT_EQ(v.votes, 2);
}

TEST(MajorityVoteProperty, FrequencyMatchesBruteForceCount) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> pool = {"x", "y", "z", ""};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> answers(1 + rng() % 25);
    for (auto& a : answers) a = pool[rng() % pool.size()];
    auto v = majority_vote(answers);
    int best = 0;
    for (const std::string c : {"x", "y", "z"}) {
      best = std::max(best, static_cast<int>(std::count(answers.begin(), answers.end(), c)));
    }
    EXPECT_EQ(v.votes, best);
    EXPECT_EQ(v.total, static_cast<int>(answers.size()));
    EXPECT_GE(v.frequency, 0.0);
    EXPECT_LE(v.frequency, 1.0);
    if (best > 0) {
      EXPECT_EQ(std::count(answers.begin(), answers.end(), v.winner), best);
    }
  }
}

// --- CoT-SC and the hybrids ----------------------------------------------------

Responder cot_sc_votes(std::vector<std::string> answers, int react_finish_at, std::string react_answer) {
  return [=](const CompletionRequest& r) -> std::string {
    if (r.label == "cot-sc") return "Reasoning. Answer: " + answers.at(static_cast<std::size_t>(r.step - 1));
    return react_reply(r, react_finish_at, react_answer);
  };
}

TEST(CoTSC, TwentyOneSamplesAtSamplingTemperature) {
  Rig rig(cot_sc_votes(ballots({{"Richard Nixon", 21}}), 1, "x"));
  auto out = run_strategy(question(), spec_for(StrategyName::CoTSC), rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 21);
  EXPECT_EQ(out.final_answer, "Richard Nixon");
  EXPECT_DOUBLE_EQ(out.vote->frequency, 1.0);
  std::set<int> sample_indexes;
  for (const auto& r : rig.requests) {
    EXPECT_EQ(r.temperature, 0.7);
    sample_indexes.insert(r.sample_index);
  }
  EXPECT_EQ(sample_indexes.size(), 21u);
  EXPECT_FALSE(uses_retrieval(StrategyName::CoTSC));
}

TEST(CoTSCThenReAct, FallsBackBelowHalf) {
  Rig rig(cot_sc_votes(ballots({{"Alpha", 10}, {"Beta", 7}, {"Gamma", 4}}), 3, "Richard Nixon"));
  auto out = run_cotsc_then_react(question(), {}, rig.ctx);
  EXPECT_EQ(out.fallback, "react");
  EXPECT_EQ(out.final_answer, "Richard Nixon");
  EXPECT_EQ(out.ledger.llm_calls, 21 + 3);
}

TEST(CoTSCThenReAct, KeepsMajorityAtOrAboveHalf) {
  Rig rig(cot_sc_votes(ballots({{"Beta", 11}, {"Alpha", 10}}), 3, "Richard Nixon"));
  auto out = run_cotsc_then_react(question(), {}, rig.ctx);
  EXPECT_FALSE(out.fallback.has_value());
  EXPECT_EQ(out.final_answer, "Beta");
  EXPECT_EQ(out.ledger.llm_calls, 21);
  EXPECT_EQ(rig.count_label("agent-"), 0u);
}

TEST(CoTSCThenReAct, EmptyReActKeepsVoteWinner) {
  Rig rig(cot_sc_votes(ballots({{"Alpha", 10}, {"Gamma", 11}}), 99, "never"));
  auto spec = spec_for(StrategyName::CoTSCThenReAct);
  spec.vote_threshold = 0.9;
  auto out = run_strategy(question(), spec, rig.ctx);
  EXPECT_EQ(out.fallback, "react");
  EXPECT_EQ(out.final_answer, "Gamma");
  EXPECT_EQ(out.ledger.llm_calls, 21 + 7);
}

TEST(ReActThenCoTSC, NoFallbackWhenReActAnswers) {
  Rig rig(cot_sc_votes(ballots({{"Alpha", 21}}), 2, "Richard Nixon"));
  auto out = run_react_then_cotsc(question(), {}, rig.ctx);
  EXPECT_FALSE(out.fallback.has_value());
  EXPECT_EQ(out.final_answer, "Richard Nixon");
  EXPECT_EQ(out.ledger.llm_calls, 2);
}

TEST(ReActThenCoTSC, FallsBackExactlyWhenEmpty) {
  Rig rig(cot_sc_votes(ballots({{"Alpha", 12}, {"Beta", 9}}), 99, "never"));
  auto out = run_react_then_cotsc(question(), {}, rig.ctx);
  EXPECT_EQ(out.fallback, "cot_sc");
  EXPECT_EQ(out.final_answer, "Alpha");
  EXPECT_EQ(out.ledger.llm_calls, 7 + 21);
  EXPECT_EQ(out.candidates.size(), 22u);
}

// --- RC and its ablations --------------------------------------------------------

TEST(RC, LedgerIsAgentStepsPlusOneJudgeCall) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") return "Action: Complete[Beta].";
    return agent_number(r) == 1 ? react_reply(r, 4, "Alpha") : react_reply(r, 3, "Beta");
  });
  auto out = run_rc(question(), {}, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 4 + 3 + 1);
  EXPECT_EQ(out.final_answer, "Beta");
  ASSERT_TRUE(out.verdict);
  EXPECT_EQ(out.verdict->selected_index, 2);
  EXPECT_EQ(out.candidates.size(), 2u);
  for (const auto& r : rig.requests) EXPECT_EQ(r.temperature, 0.0);
}

TEST(RC, IdenticalAnswersSkipTheJudge) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") ADD_FAILURE() << "judge must not be called";
    return agent_number(r) == 1 ? react_reply(r, 2, "Richard Nixon") : react_reply(r, 3, "richard nixon");
  });
  auto out = run_rc(question(), {}, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 2 + 3);
  EXPECT_EQ(out.verdict->mode, VerdictMode::ShortCircuitIdentical);
  EXPECT_EQ(out.verdict->judge_calls, 0);
}

TEST(RC, AgentsShareNoEnvironmentState) {
  // Both agents look up the same needle; each must see its own first result.
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") return "Action: Complete[x].";
    if (r.step == 1) return "Action 1: Search[Colorado orogeny]";
    if (r.step == 2) return "Action 2: Lookup[eastern sector]";
    return "Action 3: Finish[" + r.label + "]";
  });
  auto out = run_rc(question(), {}, rig.ctx);
  ASSERT_EQ(out.candidates.size(), 2u);
  for (const auto& c : out.candidates) {
    EXPECT_TRUE(c.trajectory.steps.at(1).observation.starts_with("(Result 1 / 3)"));
  }
}

TEST(RC, FeverUsesEnhancedPromptAndReActBaselineDoesNot) {
  auto task = testing::fever("f", "Stranger Things is set in Indiana.", "SUPPORTS");
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") return "Action: Complete[SUPPORTS].";
    return react_reply(r, 1, "SUPPORTS");
  });
  run_rc(task, {}, rig.ctx);
  auto enhanced = PromptCatalog::builtin().render("react_enhanced_fever", {{"question", task.question}});
  EXPECT_TRUE(rig.requests.at(0).prompt.starts_with(enhanced));

  Rig base([](const CompletionRequest& r) { return react_reply(r, 1, "SUPPORTS"); });
  run_strategy(task, spec_for(StrategyName::ReAct), base.ctx);
  auto plain = PromptCatalog::builtin().render("react_fever", {{"question", task.question}});
  EXPECT_TRUE(base.requests.at(0).prompt.starts_with(plain));
  EXPECT_EQ(react_prompt_for(spec_for(StrategyName::RC), Dataset::FEVER), PromptSet::FeverReasoningEnhanced);
  EXPECT_EQ(react_prompt_for(spec_for(StrategyName::RC), Dataset::HotpotQA), PromptSet::ReActDefault);
}

TEST(RCk, FiveIdenticalAgentsNeedNoJudge) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") ADD_FAILURE() << "judge must not be called";
    return react_reply(r, agent_number(r), "Richard Nixon");
  });
  auto spec = spec_for(StrategyName::RCk);
  spec.k = 5;
  auto out = run_strategy(question(), spec, rig.ctx);
  EXPECT_EQ(out.candidates.size(), 5u);
  EXPECT_EQ(out.ledger.llm_calls, 1 + 2 + 3 + 4 + 5);
  EXPECT_EQ(rig.count_label("judge"), 0u);
  for (const auto& r : rig.requests) EXPECT_EQ(r.temperature, 0.7);
}

TEST(RCk, DisagreementCallsJudgeOnce) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") return "Action: Complete[Richard Nixon].";
    return react_reply(r, 2, agent_number(r) == 3 ? "Gerald Ford" : "Richard Nixon");
  });
  auto spec = spec_for(StrategyName::RCk);
  spec.k = 3;
  auto out = run_strategy(question(), spec, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 3 * 2 + 1);
  EXPECT_NE(rig.requests.back().prompt.find("three"), std::string::npos);
}

TEST(RCWithoutJudge, RunsOneAgent) {
  Rig rig([](const CompletionRequest& r) { return react_reply(r, 3, "Richard Nixon"); });
  auto out = run_rc_without_judge(question(), {}, rig.ctx);
  EXPECT_EQ(out.candidates.size(), 1u);
  EXPECT_EQ(out.ledger.llm_calls, 3);
  EXPECT_FALSE(out.verdict.has_value());
  EXPECT_EQ(rig.count_label("agent-1"), 3u);
}

TEST(ReActSC, VotesOverThreeSampledAgents) {
  Rig rig([](const CompletionRequest& r) {
    return react_reply(r, agent_number(r) + 1, agent_number(r) == 2 ? "Gerald Ford" : "Richard Nixon");
  });
  auto out = run_react_sc(question(), {}, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 2 + 3 + 4);
  EXPECT_EQ(out.final_answer, "Richard Nixon");
  EXPECT_EQ(out.vote->votes, 2);
  for (const auto& r : rig.requests) EXPECT_EQ(r.temperature, 0.7);
}

TEST(ReActThenMAD, DebateAddsFourCallsThenJudge) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") return "Action: Complete[Alpha].";
    if (r.label.starts_with("debater-")) return "I stand by my answer.";
    return react_reply(r, 3, agent_number(r) == 1 ? "Alpha" : "Beta");
  });
  auto out = run_react_then_mad(question(), {}, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 3 + 3 + 4 + 1);
  ASSERT_TRUE(out.debate);
  EXPECT_EQ(out.debate->calls, 4);
  EXPECT_EQ(rig.count_label("debater-"), 4u);
  EXPECT_EQ(out.verdict->selected_index, 1);
}

TEST(ReActThenLLMJudge, AnswersOnlyJudgeSeesNoTrajectories) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") return "Action: Complete[Beta].";
    return react_reply(r, 2, agent_number(r) == 1 ? "Alpha" : "Beta");
  });
  auto out = run_react_then_llm_judge(question(), {}, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 2 + 2 + 1);
  EXPECT_EQ(rig.requests.back().label, "judge");
  EXPECT_EQ(rig.requests.back().prompt.find("Search[Richard Nixon]"), std::string::npos);
  EXPECT_EQ(out.final_answer, "Beta");
}

TEST(CoTThenJudge, TwoCoTAgentsAndOneJudgeCall) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") return "Action: Complete[Alpha].";
    return r.label == "cot-1" ? "Answer: Alpha" : "Answer: Beta";
  });
  auto out = run_cot_then_judge(question(), {}, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 2 + 1);
  EXPECT_EQ(out.final_answer, "Alpha");
}

TEST(MAD, AlwaysDebatesEvenWhenAgentsAgree) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "judge") return "Action: Complete[Alpha].";
    if (r.label.starts_with("debater-")) return "Agreed.";
    return "Answer: Alpha";
  });
  auto out = run_mad(question(), {}, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 2 + 4 + 1);
  EXPECT_FALSE(uses_retrieval(StrategyName::MAD));
}

TEST(SelfRefine, OneRoundAddsTwoCalls) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "refine") return r.step == 1 ? "The answer looks right." : "Answer: Richard Nixon";
    return react_reply(r, 3, "Richard Nixon");
  });
  auto out = run_react_self_refine(question(), {}, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 3 + 2);
  ASSERT_EQ(out.refinements.size(), 1u);
  EXPECT_TRUE(out.converged);
  EXPECT_EQ(out.final_answer, "Richard Nixon");
  auto extras = outcome_extras(out);
  EXPECT_EQ(extras["converged"], true);
}

TEST(SelfRefine, RevisionReplacesAnswer) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "refine") return r.step == 1 ? "Check the middle name." : "Revised.\nRichard Milhous Nixon";
    return react_reply(r, 2, "Nixon");
  });
  auto out = run_react_self_refine(question(), {}, rig.ctx);
  EXPECT_FALSE(out.converged);
  EXPECT_EQ(out.final_answer, "Richard Milhous Nixon");
  auto revise = rig.requests.back().prompt;
  EXPECT_NE(revise.find("Check the middle name."), std::string::npos);
}

TEST(Standard, SingleCallAndConcisenessSwitch) {
  Rig rig([](const CompletionRequest&) { return "Richard Nixon"; });
  auto spec = spec_for(StrategyName::Standard);
  auto out = run_strategy(question(), spec, rig.ctx);
  EXPECT_EQ(out.ledger.llm_calls, 1);
  spec.standard_concise = false;
  run_strategy(question(), spec, rig.ctx);
  EXPECT_NE(rig.requests[0].prompt, rig.requests[1].prompt);
}

TEST(Strategies, FailingAgentIsDroppedAndRecorded) {
  Rig rig([](const CompletionRequest& r) -> std::string {
    if (r.label == "agent-2") throw BackendUnavailable("boom");
    return react_reply(r, 2, "Richard Nixon");
  });
  auto out = run_rc(question(), {}, rig.ctx);
  EXPECT_EQ(out.candidates.size(), 1u);
  ASSERT_EQ(out.agent_failures.size(), 1u);
  EXPECT_TRUE(out.agent_failures[0].starts_with("agent-2: "));
  EXPECT_EQ(out.verdict->mode, VerdictMode::ShortCircuitIdentical);
}

TEST(Strategies, AllAgentsFailingRaises) {
  Rig rig([](const CompletionRequest&) -> std::string { throw BackendUnavailable("down"); });
  EXPECT_THROW(run_rc(question(), {}, rig.ctx), BackendUnavailable);
}

TEST(LedgerProperty, RcCallsEqualStepsPlusJudge) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    int s1 = 1 + static_cast<int>(rng() % 7), s2 = 1 + static_cast<int>(rng() % 7);
    bool agree = rng() % 2 == 0;
    bool judge_retry = rng() % 2 == 0;
    Rig rig([=](const CompletionRequest& r) -> std::string {
      if (r.label == "judge") return judge_retry && r.step == 1 ? "" : "Action: Complete[Alpha].";
      return agent_number(r) == 1 ? react_reply(r, s1, "Alpha") : react_reply(r, s2, agree ? "Alpha" : "Beta");
    });
    auto out = run_rc(question(), {}, rig.ctx);
    long judge = agree ? 0 : (judge_retry ? 2 : 1);
    EXPECT_EQ(out.ledger.llm_calls, s1 + s2 + judge);
    EXPECT_EQ(static_cast<long>(rig.requests.size()), out.ledger.llm_calls);
  }
}

// --- configuration ----------------------------------------------------------------

TEST(StrategySpec, Defaults) {
  StrategySpec s;
  EXPECT_EQ(s.rc_agents, 2);
  EXPECT_EQ(s.cot_sc_samples, 21);
  EXPECT_DOUBLE_EQ(s.sc_temperature, 0.7);
  EXPECT_DOUBLE_EQ(s.vote_threshold, 0.5);
  EXPECT_DOUBLE_EQ(s.temperature, 0.0);
  EXPECT_EQ(s.debate_rounds, 2);
  EXPECT_EQ(s.refine_rounds, 1);
}

TEST(StrategySpec, JsonRoundTripAndValidation) {
  auto spec = strategy_spec_from_json(StrategyName::RCk, {{"k", 4}, {"react_prompt", "react"}, {"sample_offset", 1000}});
  EXPECT_EQ(spec.k, 4);
  EXPECT_EQ(spec.react_prompt, PromptSet::ReActDefault);
  auto j = strategy_spec_to_json(spec);
  EXPECT_EQ(j["name"], "rc_k");
  EXPECT_EQ(j["k"], 4);
  EXPECT_EQ(j["sample_offset"], 1000);
  EXPECT_THROW(strategy_spec_from_json(StrategyName::RC, {{"bogus", 1}}), ConfigError);
  EXPECT_THROW(strategy_spec_from_json(StrategyName::RCk, {{"k", 1}}), ConfigError);
  EXPECT_THROW(strategy_spec_from_json(StrategyName::RC, {{"vote_threshold", 1.5}}), ConfigError);
  EXPECT_THROW(strategy_spec_from_json(StrategyName::RC, {{"temperature", -1}}), ConfigError);
  EXPECT_THROW(strategy_spec_from_json(StrategyName::RC, {{"react_prompt", "cot"}}), ConfigError);
  EXPECT_THROW(strategy_spec_from_json(StrategyName::RC, nlohmann::json::array()), ConfigError);
  EXPECT_EQ(strategy_spec_from_json(StrategyName::RC, nullptr).rc_agents, 2);
}

TEST(StrategySpec, ValidateRejectsMismatchedTemplates) {
  const auto& catalog = PromptCatalog::builtin();
  auto spec = spec_for(StrategyName::RC);
  spec.react_template = "react_musique";
  EXPECT_THROW(validate_strategy(spec, Dataset::FEVER, catalog), ConfigError);
  EXPECT_NO_THROW(validate_strategy(spec, Dataset::MuSiQue, catalog));
  auto enhanced = spec_for(StrategyName::ReAct);
  enhanced.react_prompt = PromptSet::FeverReasoningEnhanced;
  EXPECT_THROW(validate_strategy(enhanced, Dataset::HotpotQA, catalog), ConfigError);
  auto missing = spec_for(StrategyName::RC);
  missing.react_template = "no_such_template";
  EXPECT_THROW(validate_strategy(missing, Dataset::HotpotQA, catalog), ConfigError);
  for (auto name : all_strategies()) {
    for (auto ds : {Dataset::HotpotQA, Dataset::FEVER, Dataset::MuSiQue}) {
      EXPECT_NO_THROW(validate_strategy(spec_for(name), ds, catalog)) << to_string(name);
    }
  }
}

TEST(StrategyNames, RoundTrip) {
  EXPECT_EQ(all_strategies().size(), 15u);
  for (auto name : all_strategies()) EXPECT_EQ(strategy_from_string(to_string(name)), name);
  EXPECT_EQ(strategy_from_string("RC"), StrategyName::RC);
  EXPECT_THROW(strategy_from_string("nope"), ConfigError);
}

TEST(Strategies, MusiqueRunsWithoutCorpus) {
  std::vector<Paragraph> ctx = {{"Lion Air", "Lion Air is based in Jakarta."}};
  for (int i = 0; i < 19; ++i) ctx.push_back({"Other " + std::to_string(i), "Filler."});
  auto task = make_task("m", Dataset::MuSiQue, "Where is Lion Air based?", {"Jakarta"}, ctx);
  auto backend = std::make_shared<CallbackBackend>([](const CompletionRequest& r) -> std::string {
    if (r.step == 1) return "Action 1: Search[Lion Air]";
    return "Action 2: Finish[Jakarta]";
  });
  LlmGateway gateway(backend, "m");
  StrategyContext sc{gateway, nullptr};
  auto out = run_rc(task, {}, sc);
  EXPECT_EQ(out.final_answer, "Jakarta");
  EXPECT_EQ(out.candidates[0].trajectory.steps[0].observation, "Lion Air is based in Jakarta.");
}

}  // namespace
}  // namespace rcourt
