#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace swipt::cli {

// Exit codes: 0 success, 1 validation error, 2 runtime error,
// 3 verification failure.
int cmd_transient(const RunConfig& cfg);
int cmd_ber(const RunConfig& cfg);
int cmd_eh(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

// Full front-end: parses flags/subcommand, loads the config file and
// dispatches. `args` excludes the program name.
int run(const std::vector<std::string>& args);

} // namespace swipt::cli
