#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctsev::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDataError = 2,
  kExitInvariant = 3,
};

// Parses `args` (without the program name) and runs one subcommand.
// Never throws; errors are written to `err` and mapped to an exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctsev::cli
