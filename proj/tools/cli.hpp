#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lexind::cli {

// Exit codes: 0 success, 1 data or numerical failure, 2 usage failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// Lines "key = value" ("#" starts a comment) become "--key=value" tokens,
// inserted after the subcommand words so explicit flags override them.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace lexind::cli
