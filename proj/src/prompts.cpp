#include "rcourt/prompts.hpp"

#include "rcourt/errors.hpp"

#include <fstream>
#include <sstream>

namespace rcourt {

std::string_view to_string(PromptSet set) {
  switch (set) {
    case PromptSet::ReActDefault: return "react";
    case PromptSet::FeverReasoningEnhanced: return "react_enhanced";
    case PromptSet::CoT: return "cot";
    case PromptSet::Standard: return "standard";
    case PromptSet::StandardNoConciseness: return "standard_loose";
  }
  return "unknown";
}

PromptSet prompt_set_from_string(std::string_view name) {
  for (auto set : {PromptSet::ReActDefault, PromptSet::FeverReasoningEnhanced, PromptSet::CoT,
                   PromptSet::Standard, PromptSet::StandardNoConciseness}) {
    if (to_string(set) == name) return set;
  }
  throw ConfigError("unknown prompt set: " + std::string(name));
}

std::string render_template(std::string_view text, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      auto close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = vars.find(std::string(text.substr(i + 1, close - i - 1)));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

const PromptCatalog& PromptCatalog::builtin() {
  static const PromptCatalog catalog = [] {
    PromptCatalog c;
    for (const auto& p : detail::embedded_prompts()) {
      c.templates_.emplace(std::string(p.name), std::string(p.text));
    }
    return c;
  }();
  return catalog;
}

PromptCatalog PromptCatalog::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("prompt directory does not exist: " + dir.string());
  }
  PromptCatalog catalog = builtin();
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    catalog.templates_[entry.path().stem().string()] = buf.str();
  }
  return catalog;
}

bool PromptCatalog::contains(const std::string& name) const { return templates_.count(name) > 0; }

const std::string& PromptCatalog::raw(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw ConfigError("unknown prompt template: " + name);
  return it->second;
}

std::string PromptCatalog::render(const std::string& name,
                                  const std::map<std::string, std::string>& vars) const {
  return render_template(raw(name), vars);
}

std::vector<std::string> PromptCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : templates_) out.push_back(name);
  return out;
}

std::string agent_prompt_name(PromptSet set, Dataset dataset) {
  auto ds = std::string(to_string(dataset));
  switch (set) {
    case PromptSet::ReActDefault: return "react_" + ds;
    case PromptSet::FeverReasoningEnhanced:
      if (dataset != Dataset::FEVER) {
        throw ConfigError("the reasoning-enhanced ReAct prompt exists only for fever");
      }
      return "react_enhanced_fever";
    case PromptSet::CoT: return "cot_" + ds;
    case PromptSet::Standard: return "standard_" + ds;
    case PromptSet::StandardNoConciseness: return "standard_loose_" + ds;
  }
  throw ConfigError("unknown prompt set");
}

std::string judge_prompt_name(Dataset dataset) { return "judge_rc_" + std::string(to_string(dataset)); }

std::optional<Dataset> template_dataset(std::string_view name) {
  for (auto ds : {Dataset::HotpotQA, Dataset::FEVER, Dataset::MuSiQue}) {
    auto suffix = "_" + std::string(to_string(ds));
    if (name.size() > suffix.size() && name.ends_with(suffix)) return ds;
  }
  return std::nullopt;
}

}  // namespace rcourt
