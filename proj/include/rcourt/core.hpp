#pragma once

// Domain model shared by every stage: tasks, actions, trajectories and the
// Thought/Action/Observation wire format that agents read and write.

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rcourt {

enum class Dataset { HotpotQA, FEVER, MuSiQue };

std::string_view to_string(Dataset dataset);
// Accepts "hotpotqa", "fever", "musique" in any case.
Dataset dataset_from_string(std::string_view name);

// 7 for HotpotQA and MuSiQue, 5 for FEVER.
int default_step_limit(Dataset dataset);

inline constexpr std::string_view kSupports = "SUPPORTS";
inline constexpr std::string_view kRefutes = "REFUTES";
inline constexpr std::string_view kNotEnoughInfo = "NOT ENOUGH INFO";

struct Paragraph {
  std::string title;
  std::string text;

  bool operator==(const Paragraph&) const = default;
};

struct TaskSpec {
  std::string id;
  Dataset dataset = Dataset::HotpotQA;
  std::string question;  // the claim for FEVER
  std::vector<std::string> gold;
  std::optional<std::vector<Paragraph>> context;  // MuSiQue only
  int step_limit = 7;
};

// Builds a task with the dataset's default step limit unless overridden.
// Throws std::invalid_argument when the context/dataset pairing is wrong.
TaskSpec make_task(std::string id, Dataset dataset, std::string question,
                   std::vector<std::string> gold,
                   std::optional<std::vector<Paragraph>> context = std::nullopt,
                   std::optional<int> step_limit = std::nullopt);

void validate(const TaskSpec& task);

enum class ActionKind { Search, Lookup, TitleLookup, Finish };

struct Action {
  ActionKind kind = ActionKind::Finish;
  std::string payload;

  bool operator==(const Action&) const = default;
};

bool action_allowed(ActionKind kind, Dataset dataset);

// Parses the first line of `raw` that starts with a Verb[payload] shape. An
// optional "Action N:" label on that line is tolerated. The payload runs to the
// last ']' on the line and is whitespace-trimmed. For MuSiQue, Search, Lookup
// and TitleLookup all address a paragraph title.
// Throws MalformedAction.
Action parse_action(std::string_view raw, Dataset dataset);

// Inverse of parse_action. TitleLookup renders as Search[...], the verb the
// MuSiQue few-shot transcripts use.
std::string render_action(const Action& action);

// Observation returned to an agent whose action could not be parsed.
std::string invalid_action_observation(Dataset dataset);

struct Step {
  int index = 1;
  std::string thought;
  std::optional<Action> action;  // empty when the emitted action was malformed
  std::string action_text;       // the "Action i:" line as it will be rendered
  std::string observation;

  bool operator==(const Step&) const = default;
};

Step make_step(int index, std::string thought, Action action, std::string observation);
Step make_invalid_step(int index, std::string thought, std::string raw_action,
                       std::string observation);

struct Trajectory {
  std::string task_id;
  std::string agent_label;
  std::vector<Step> steps;

  bool finished() const;
  bool operator==(const Trajectory&) const = default;
};

// Throws std::logic_error when indices, Finish placement or length are off.
void check_trajectory(const Trajectory& trajectory, int step_limit);

// "Thought i: ...\nAction i: ...\nObservation i: ...\n" per step; Finish steps
// have no Observation line.
std::string render_trajectory(const Trajectory& trajectory);

enum class AnswerStatus { Finished, StepLimitExhausted, CollapsedMalformed };

std::string_view to_string(AnswerStatus status);
AnswerStatus answer_status_from_string(std::string_view name);

struct CandidateAnswer {
  std::string answer;
  AnswerStatus status = AnswerStatus::CollapsedMalformed;
  Trajectory trajectory;

  bool operator==(const CandidateAnswer&) const = default;
};

// Strips surrounding whitespace and one layer of matching quotes.
std::string clean_answer(std::string_view text);

// Answer identity used for selection and short-circuiting: cleaned and
// compared case-insensitively.
bool answers_match(std::string_view a, std::string_view b);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
std::string to_upper(std::string_view text);

void to_json(nlohmann::json& j, const Action& action);
void from_json(const nlohmann::json& j, Action& action);
void to_json(nlohmann::json& j, const Step& step);
void from_json(const nlohmann::json& j, Step& step);
void to_json(nlohmann::json& j, const Trajectory& trajectory);
void from_json(const nlohmann::json& j, Trajectory& trajectory);
void to_json(nlohmann::json& j, const CandidateAnswer& candidate);
void from_json(const nlohmann::json& j, CandidateAnswer& candidate);

// One JSON object per step, newline-terminated.
std::string trajectory_to_jsonl(const Trajectory& trajectory);

}  // namespace rcourt
