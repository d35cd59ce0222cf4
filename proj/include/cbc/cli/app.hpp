#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cbc {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,          // unreadable or malformed input, bad flags
  kExitUnknownClass = 2,
  kExitNoCouples = 3,
  kExitNoCovering = 4,
  kExitSuiteMismatch = 5,  // suite names classes or methods the program lacks
};

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbc
