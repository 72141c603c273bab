#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace an2c {

/// Exit codes of the command-line tool.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int max_iter = 2;
inline constexpr int numeric_failure = 3;
inline constexpr int check_failed = 4;
}  // namespace exit_code

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`, diagnostics and usage text to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace an2c
