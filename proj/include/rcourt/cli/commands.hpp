#pragma once

// Command-line front end: run, score, analyze, report and cache subcommands.

#include <string>
#include <vector>

#include <json.hpp>

namespace rcourt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Applies `key.path=value` overrides to a config document. The value is read
// as JSON when it parses, otherwise as a string. Throws ConfigError.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Entry point shared by the rcourt binary and the tests. Returns the exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace rcourt::cli
