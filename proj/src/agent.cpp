#include "rcourt/agent.hpp"

#include "rcourt/errors.hpp"

#include <algorithm>
#include <regex>
#include <stdexcept>

namespace rcourt {

namespace {

std::string one_line(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : trim(text)) {
    if (c == '\n' || c == '\r') {
      space = true;
      continue;
    }
    if (space && !out.empty() && out.back() != ' ') out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

std::string first_line(std::string_view text) {
  auto nl = text.find('\n');
  return trim(text.substr(0, nl));
}

int effective_limit(const TaskSpec& task, const AgentConfig& config) {
  int limit = config.step_limit > 0 ? config.step_limit : task.step_limit;
  if (limit <= 0) throw std::invalid_argument("step limit must be positive");
  return limit;
}

CompletionRequest single_shot_request(std::string prompt, const AgentConfig& config) {
  CompletionRequest req;
  req.prompt = std::move(prompt);
  req.temperature = config.temperature;
  req.max_tokens = config.max_tokens;
  req.stop = kSingleShotStop;
  req.sample_index = config.sample_index;
  req.label = config.agent_label;
  req.step = config.call_step;
  return req;
}

Trajectory empty_trajectory(const TaskSpec& task, const AgentConfig& config) {
  Trajectory t;
  t.task_id = task.id;
  t.agent_label = config.agent_label;
  return t;
}

}  // namespace

std::string apply_stop(std::string text, const std::vector<std::string>& stop) {
  auto cut = std::string::npos;
  for (const auto& s : stop) {
    if (s.empty()) continue;
    cut = std::min(cut, text.find(s));
  }
  if (cut != std::string::npos) text.resize(cut);
  return text;
}

ParsedStep parse_react_completion(std::string_view completion, Dataset dataset) {
  static const std::regex kThoughtPrefix(R"(^\s*Thought\s*\d*\s*:)", std::regex::icase);
  static const std::regex kActionLabel(R"((^|\n)[ \t]*Action\s*\d*\s*:)", std::regex::icase);

  std::string text(completion);
  std::smatch m;
  if (std::regex_search(text, m, kThoughtPrefix)) text = m.suffix();

  ParsedStep parsed;
  if (!std::regex_search(text, m, kActionLabel)) {
    // No label: the model may still have written a bare Verb[payload] line.
    static const std::regex kBareVerb(R"((^|\n)[ \t]*[A-Za-z]+\s*\[)");
    parsed.thought = one_line(text);
    if (std::regex_search(text, m, kBareVerb)) {
      auto start = static_cast<std::size_t>(m.position(0) + m.length(1));
      auto line = first_line(text.substr(start));
      try {
        parsed.action = parse_action(line, dataset);
        parsed.thought = one_line(m.prefix().str());
      } catch (const MalformedAction&) {
      }
      parsed.action_text = line;
    }
    return parsed;
  }
  parsed.thought = one_line(m.prefix().str());
  std::string rest = m.suffix();
  parsed.action_text = first_line(rest);
  try {
    parsed.action = parse_action(rest, dataset);
  } catch (const MalformedAction&) {
  }
  return parsed;
}

std::optional<std::string> extract_cot_answer(std::string_view completion) {
  auto pos = completion.rfind("Answer:");
  if (pos == std::string_view::npos) return std::nullopt;
  auto answer = clean_answer(first_line(completion.substr(pos + 7)));
  if (answer.empty()) return std::nullopt;
  return answer;
}

std::string resolve_agent_template(const TaskSpec& task, const AgentConfig& config) {
  if (!config.template_override.empty()) return config.template_override;
  return agent_prompt_name(config.prompt_set, task.dataset);
}

std::string react_prompt(const TaskSpec& task, const Trajectory& trajectory, int next_step,
                         const std::string& template_name, const PromptCatalog& catalog) {
  return catalog.render(template_name, {{"question", task.question}}) +
         render_trajectory(trajectory) + "Thought " + std::to_string(next_step) + ":";
}

AgentResult run_react(const TaskSpec& task, EnvSession& env, const AgentConfig& config,
                      const LlmSession& llm, const PromptCatalog& catalog) {
  if (config.prompt_set != PromptSet::ReActDefault &&
      config.prompt_set != PromptSet::FeverReasoningEnhanced) {
    throw std::invalid_argument("run_react needs a ReAct prompt set");
  }
  if (env.dataset() != task.dataset) throw std::invalid_argument("environment/task dataset mismatch");
  const int limit = effective_limit(task, config);
  const auto template_name = resolve_agent_template(task, config);

  AgentResult result;
  auto& trajectory = result.candidate.trajectory;
  trajectory = empty_trajectory(task, config);

  for (int i = 1; i <= limit; ++i) {
    CompletionRequest req;
    req.prompt = react_prompt(task, trajectory, i, template_name, catalog);
    req.temperature = config.temperature;
    req.max_tokens = config.max_tokens;
    req.stop = kReActStop;
    req.sample_index = config.sample_index;
    req.label = config.agent_label;
    req.step = i;
    auto completion = apply_stop(llm.complete(std::move(req)).text, kReActStop);
    ++result.calls_used;

    auto parsed = parse_react_completion(completion, task.dataset);
    if (!parsed.action) {
      ++result.malformed_count;
      trajectory.steps.push_back(make_invalid_step(i, parsed.thought, parsed.action_text,
                                                   invalid_action_observation(task.dataset)));
      continue;
    }
    if (parsed.action->kind == ActionKind::Finish) {
      auto answer = clean_answer(parsed.action->payload);
      if (answer.empty()) {
        ++result.malformed_count;
        trajectory.steps.push_back(make_invalid_step(i, parsed.thought, parsed.action_text,
                                                     invalid_action_observation(task.dataset)));
        continue;
      }
      trajectory.steps.push_back(
          make_step(i, parsed.thought, Action{ActionKind::Finish, answer}, ""));
      result.candidate.answer = answer;
      result.candidate.status = AnswerStatus::Finished;
      return result;
    }
    auto observation = one_line(env.execute(*parsed.action));
    trajectory.steps.push_back(make_step(i, parsed.thought, *parsed.action, observation));
  }

  result.candidate.answer.clear();
  result.candidate.status = result.malformed_count == limit ? AnswerStatus::CollapsedMalformed
                                                            : AnswerStatus::StepLimitExhausted;
  return result;
}

AgentResult run_cot(const TaskSpec& task, const AgentConfig& config, const LlmSession& llm,
                    const PromptCatalog& catalog) {
  if (config.prompt_set != PromptSet::CoT) throw std::invalid_argument("run_cot needs the CoT prompt set");
  auto prompt = catalog.render(resolve_agent_template(task, config), {{"question", task.question}});
  auto completion = apply_stop(llm.complete(single_shot_request(std::move(prompt), config)).text,
                               kSingleShotStop);

  AgentResult result;
  result.calls_used = 1;
  auto& candidate = result.candidate;
  candidate.trajectory = empty_trajectory(task, config);

  auto answer = extract_cot_answer(completion);
  auto label = completion.rfind("Answer:");
  auto thought = one_line(label == std::string::npos ? completion : completion.substr(0, label));
  if (!answer) {
    result.malformed_count = 1;
    candidate.status = AnswerStatus::CollapsedMalformed;
    candidate.trajectory.steps.push_back(make_invalid_step(1, thought, "", ""));
    return result;
  }
  candidate.answer = *answer;
  candidate.status = AnswerStatus::Finished;
  candidate.trajectory.steps.push_back(make_step(1, thought, Action{ActionKind::Finish, *answer}, ""));
  return result;
}

AgentResult run_standard(const TaskSpec& task, const AgentConfig& config, const LlmSession& llm,
                         const PromptCatalog& catalog) {
  if (config.prompt_set != PromptSet::Standard &&
      config.prompt_set != PromptSet::StandardNoConciseness) {
    throw std::invalid_argument("run_standard needs a Standard prompt set");
  }
  auto prompt = catalog.render(resolve_agent_template(task, config), {{"question", task.question}});
  auto completion = apply_stop(llm.complete(single_shot_request(std::move(prompt), config)).text,
                               kSingleShotStop);

  AgentResult result;
  result.calls_used = 1;
  auto& candidate = result.candidate;
  candidate.trajectory = empty_trajectory(task, config);
  auto answer = clean_answer(completion);
  if (answer.empty()) {
    result.malformed_count = 1;
    candidate.status = AnswerStatus::CollapsedMalformed;
    candidate.trajectory.steps.push_back(make_invalid_step(1, "", "", ""));
    return result;
  }
  candidate.answer = answer;
  candidate.status = AnswerStatus::Finished;
  candidate.trajectory.steps.push_back(make_step(1, "", Action{ActionKind::Finish, answer}, ""));
  return result;
}

}  // namespace rcourt
