#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmexpose {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitWarnings = 1,  // only with --strict
  kExitUsage = 2,
  kExitInput = 3,
  kExitInternal = 4,
};

/// Runs one command. `args` excludes the program name. Results go to `out`,
/// diagnostics to `err`; standard input is read for `--diff -`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmexpose
