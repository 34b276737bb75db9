#pragma once

#include <string>
#include <vector>

#include "symprox/io.hpp"

namespace symprox {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3, kExitIo = 4 };

// Names of the configs shipped with the tool, in a fixed order.
std::vector<std::string> bundled_config_names();
Json bundled_config(const std::string& name);

// Runs one experiment config, writing artifacts and manifest.json into out.
// Returns the result document that is also printed by the CLI.
Json run_experiment(const Json& config, const std::string& out_dir);

// Entry point shared by the symprox binary and the tests.
int run_cli(const std::vector<std::string>& args);

}  // namespace symprox
