#pragma once

// Prompt catalog: the plain-text templates under prompts/ are compiled into the
// library, and a directory of overrides can replace individual entries.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rcourt/core.hpp"

namespace rcourt {

namespace detail {
struct EmbeddedPrompt {
  std::string_view name;
  std::string_view text;
};
const std::vector<EmbeddedPrompt>& embedded_prompts();
}  // namespace detail

enum class PromptSet { ReActDefault, FeverReasoningEnhanced, CoT, Standard, StandardNoConciseness };

std::string_view to_string(PromptSet set);
PromptSet prompt_set_from_string(std::string_view name);

// Single pass over `text`: every {name} with a binding is replaced; unknown
// placeholders and stray braces are left as they are. Substituted values are
// never rescanned.
std::string render_template(std::string_view text, const std::map<std::string, std::string>& vars);

class PromptCatalog {
 public:
  static const PromptCatalog& builtin();
  // Builtin entries, with every <name>.txt in `dir` replacing or adding one.
  static PromptCatalog from_directory(const std::filesystem::path& dir);

  bool contains(const std::string& name) const;
  // Throws ConfigError for an unknown name.
  const std::string& raw(const std::string& name) const;
  std::string render(const std::string& name, const std::map<std::string, std::string>& vars) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::string> templates_;
};

// Throws ConfigError when the set has no template for the dataset
// (FeverReasoningEnhanced exists only for FEVER).
std::string agent_prompt_name(PromptSet set, Dataset dataset);
std::string judge_prompt_name(Dataset dataset);

inline constexpr std::string_view kAnswersOnlyJudgePrompt = "judge_answers_only";
inline constexpr std::string_view kDebaterPrompt = "debater";
inline constexpr std::string_view kRefineFeedbackPrompt = "refine_feedback";
inline constexpr std::string_view kRefineRevisePrompt = "refine_revise";

// The dataset a ReAct template is written for, from its suffix; nullopt for
// templates that are not dataset-specific.
std::optional<Dataset> template_dataset(std::string_view name);

}  // namespace rcourt
