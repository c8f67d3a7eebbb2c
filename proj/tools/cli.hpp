#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levyou::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericFailure = 3 };

// Runs `levy_ou <args...>` (args excludes the program name). Results go to
// --out or `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace levyou::cli
