#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "quanta/error.hpp"

namespace quanta {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitUnsupported = 2,
  kExitInput = 3,
};

int exit_code_for(ErrorCode code);

/// Runs one command; `args` excludes the program name. Documents go to
/// `out` as JSON, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace quanta
