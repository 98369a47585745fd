#include "rcourt/core.hpp"

#include "rcourt/errors.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace rcourt {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Drops a leading "Action", "Action 3:" or "Action:" label.
std::string_view strip_action_label(std::string_view line) {
  auto s = trim_view(line);
  constexpr std::string_view kLabel = "action";
  if (s.size() < kLabel.size()) return s;
  for (std::size_t i = 0; i < kLabel.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != kLabel[i]) return s;
  }
  auto rest = s.substr(kLabel.size());
  std::size_t i = 0;
  while (i < rest.size() && (is_space(rest[i]) || std::isdigit(static_cast<unsigned char>(rest[i])))) ++i;
  if (i < rest.size() && rest[i] == ':') return trim_view(rest.substr(i + 1));
  return s;
}

struct VerbShape {
  std::string verb;
  std::string_view payload;
};

// Verb[payload] at the start of the line; payload ends at the last ']'.
std::optional<VerbShape> match_verb_shape(std::string_view line) {
  auto s = strip_action_label(line);
  std::size_t i = 0;
  while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
  if (i == 0) return std::nullopt;
  std::string verb(s.substr(0, i));
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  if (i >= s.size() || s[i] != '[') return std::nullopt;
  auto close = s.rfind(']');
  if (close == std::string_view::npos || close < i) return std::nullopt;
  return VerbShape{to_lower(verb), s.substr(i + 1, close - i - 1)};
}

}  // namespace

std::string trim(std::string_view text) { return std::string(trim_view(text)); }

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string to_upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string_view to_string(Dataset dataset) {
  switch (dataset) {
    case Dataset::HotpotQA: return "hotpotqa";
    case Dataset::FEVER: return "fever";
    case Dataset::MuSiQue: return "musique";
  }
  return "unknown";
}

Dataset dataset_from_string(std::string_view name) {
  auto lowered = to_lower(trim(name));
  if (lowered == "hotpotqa") return Dataset::HotpotQA;
  if (lowered == "fever") return Dataset::FEVER;
  if (lowered == "musique") return Dataset::MuSiQue;
  throw std::invalid_argument("unknown dataset: " + std::string(name));
}

int default_step_limit(Dataset dataset) { return dataset == Dataset::FEVER ? 5 : 7; }

TaskSpec make_task(std::string id, Dataset dataset, std::string question,
                   std::vector<std::string> gold, std::optional<std::vector<Paragraph>> context,
                   std::optional<int> step_limit) {
  TaskSpec task;
  task.id = std::move(id);
  task.dataset = dataset;
  task.question = std::move(question);
  task.gold = std::move(gold);
  task.context = std::move(context);
  task.step_limit = step_limit.value_or(default_step_limit(dataset));
  validate(task);
  return task;
}

void validate(const TaskSpec& task) {
  if (task.step_limit <= 0) throw std::invalid_argument("step_limit must be positive");
  if (task.context.has_value() != (task.dataset == Dataset::MuSiQue)) {
    throw std::invalid_argument("task " + task.id +
                                ": paragraph context is required for MuSiQue and only MuSiQue");
  }
}

bool action_allowed(ActionKind kind, Dataset dataset) {
  switch (kind) {
    case ActionKind::Finish: return true;
    case ActionKind::TitleLookup: return dataset == Dataset::MuSiQue;
    case ActionKind::Search:
    case ActionKind::Lookup: return dataset != Dataset::MuSiQue;
  }
  return false;
}

Action parse_action(std::string_view raw, Dataset dataset) {
  for (auto line : split_lines(raw)) {
    auto shape = match_verb_shape(line);
    if (!shape) continue;

    Action action;
    if (shape->verb == "finish") {
      action.kind = ActionKind::Finish;
    } else if (dataset == Dataset::MuSiQue && (shape->verb == "search" || shape->verb == "titlelookup")) {
      action.kind = ActionKind::TitleLookup;
    } else if (dataset == Dataset::MuSiQue && shape->verb == "lookup") {
      throw MalformedAction("Lookup is not available for MuSiQue");
    } else if (shape->verb == "search") {
      action.kind = ActionKind::Search;
    } else if (shape->verb == "lookup") {
      action.kind = ActionKind::Lookup;
    } else if (shape->verb == "titlelookup") {
      throw MalformedAction("TitleLookup is only available for MuSiQue");
    } else {
      throw MalformedAction("unknown action verb: " + shape->verb);
    }
    action.payload = trim(shape->payload);
    if (action.payload.empty()) throw MalformedAction("empty action payload");
    return action;
  }
  throw MalformedAction("no Verb[payload] action found");
}

std::string render_action(const Action& action) {
  switch (action.kind) {
    case ActionKind::Search:
    case ActionKind::TitleLookup: return "Search[" + action.payload + "]";
    case ActionKind::Lookup: return "Lookup[" + action.payload + "]";
    case ActionKind::Finish: return "Finish[" + action.payload + "]";
  }
  return {};
}

std::string invalid_action_observation(Dataset dataset) {
  if (dataset == Dataset::MuSiQue) {
    return "Invalid action. Valid actions are: Search[title], Finish[answer].";
  }
  return "Invalid action. Valid actions are: Search[entity], Lookup[string], Finish[answer].";
}

Step make_step(int index, std::string thought, Action action, std::string observation) {
  Step step;
  step.index = index;
  step.thought = std::move(thought);
  step.action_text = render_action(action);
  step.action = std::move(action);
  step.observation = step.action->kind == ActionKind::Finish ? std::string{} : std::move(observation);
  return step;
}

Step make_invalid_step(int index, std::string thought, std::string raw_action,
                       std::string observation) {
  Step step;
  step.index = index;
  step.thought = std::move(thought);
  step.action_text = std::move(raw_action);
  step.observation = std::move(observation);
  return step;
}

bool Trajectory::finished() const {
  return !steps.empty() && steps.back().action && steps.back().action->kind == ActionKind::Finish;
}

void check_trajectory(const Trajectory& trajectory, int step_limit) {
  const auto& steps = trajectory.steps;
  if (static_cast<int>(steps.size()) > step_limit) {
    throw std::logic_error("trajectory exceeds step limit");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].index != static_cast<int>(i) + 1) {
      throw std::logic_error("step indices must be consecutive from 1");
    }
    bool is_finish = steps[i].action && steps[i].action->kind == ActionKind::Finish;
    if (is_finish && i + 1 != steps.size()) throw std::logic_error("Finish must be the last step");
    if (is_finish && !steps[i].observation.empty()) {
      throw std::logic_error("Finish step carries an observation");
    }
  }
}

std::string render_trajectory(const Trajectory& trajectory) {
  std::string out;
  for (const auto& step : trajectory.steps) {
    auto i = std::to_string(step.index);
    out += "Thought " + i + ": " + step.thought + "\n";
    out += "Action " + i + ": " + (step.action ? render_action(*step.action) : step.action_text) + "\n";
    bool is_finish = step.action && step.action->kind == ActionKind::Finish;
    if (!is_finish) out += "Observation " + i + ": " + step.observation + "\n";
  }
  return out;
}

std::string_view to_string(AnswerStatus status) {
  switch (status) {
    case AnswerStatus::Finished: return "finished";
    case AnswerStatus::StepLimitExhausted: return "step_limit_exhausted";
    case AnswerStatus::CollapsedMalformed: return "collapsed_malformed";
  }
  return "unknown";
}

AnswerStatus answer_status_from_string(std::string_view name) {
  if (name == "finished") return AnswerStatus::Finished;
  if (name == "step_limit_exhausted") return AnswerStatus::StepLimitExhausted;
  if (name == "collapsed_malformed") return AnswerStatus::CollapsedMalformed;
  throw std::invalid_argument("unknown answer status: " + std::string(name));
}

std::string clean_answer(std::string_view text) {
  auto s = trim_view(text);
  static const std::pair<std::string_view, std::string_view> kQuotes[] = {
      {"\"", "\""}, {"'", "'"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE2\x80\x98", "\xE2\x80\x99"}};
  for (const auto& [open, close] : kQuotes) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
      s = trim_view(s.substr(open.size(), s.size() - open.size() - close.size()));
      break;
    }
  }
  return std::string(s);
}

bool answers_match(std::string_view a, std::string_view b) {
  return to_lower(clean_answer(a)) == to_lower(clean_answer(b));
}

namespace {

std::string_view kind_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::Search: return "search";
    case ActionKind::Lookup: return "lookup";
    case ActionKind::TitleLookup: return "title_lookup";
    case ActionKind::Finish: return "finish";
  }
  return "unknown";
}

ActionKind kind_from_name(std::string_view name) {
  if (name == "search") return ActionKind::Search;
  if (name == "lookup") return ActionKind::Lookup;
  if (name == "title_lookup") return ActionKind::TitleLookup;
  if (name == "finish") return ActionKind::Finish;
  throw std::invalid_argument("unknown action kind: " + std::string(name));
}

}  // namespace

void to_json(nlohmann::json& j, const Action& action) {
  j = {{"kind", kind_name(action.kind)}, {"payload", action.payload}};
}

void from_json(const nlohmann::json& j, Action& action) {
  action.kind = kind_from_name(j.at("kind").get<std::string>());
  action.payload = j.at("payload").get<std::string>();
}

void to_json(nlohmann::json& j, const Step& step) {
  j = {{"index", step.index},
       {"thought", step.thought},
       {"action", step.action ? nlohmann::json(*step.action) : nlohmann::json(nullptr)},
       {"action_text", step.action_text},
       {"observation", step.observation}};
}

void from_json(const nlohmann::json& j, Step& step) {
  step.index = j.at("index").get<int>();
  step.thought = j.at("thought").get<std::string>();
  if (j.at("action").is_null()) {
    step.action.reset();
  } else {
    step.action = j.at("action").get<Action>();
  }
  step.action_text = j.at("action_text").get<std::string>();
  step.observation = j.at("observation").get<std::string>();
}

void to_json(nlohmann::json& j, const Trajectory& trajectory) {
  j = {{"task_id", trajectory.task_id},
       {"agent_label", trajectory.agent_label},
       {"steps", trajectory.steps}};
}

void from_json(const nlohmann::json& j, Trajectory& trajectory) {
  trajectory.task_id = j.at("task_id").get<std::string>();
  trajectory.agent_label = j.at("agent_label").get<std::string>();
  trajectory.steps = j.at("steps").get<std::vector<Step>>();
}

void to_json(nlohmann::json& j, const CandidateAnswer& candidate) {
  j = {{"answer", candidate.answer},
       {"status", to_string(candidate.status)},
       {"trajectory", candidate.trajectory}};
}

void from_json(const nlohmann::json& j, CandidateAnswer& candidate) {
  candidate.answer = j.at("answer").get<std::string>();
  candidate.status = answer_status_from_string(j.at("status").get<std::string>());
  candidate.trajectory = j.at("trajectory").get<Trajectory>();
}

std::string trajectory_to_jsonl(const Trajectory& trajectory) {
  std::string out;
  for (const auto& step : trajectory.steps) {
    nlohmann::json line = step;
    line["task_id"] = trajectory.task_id;
    line["agent_label"] = trajectory.agent_label;
    out += line.dump() + "\n";
  }
  return out;
}

}  // namespace rcourt
