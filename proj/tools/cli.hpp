#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cfqkd/config.hpp"

namespace cfqkd::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kRuntimeError = 2 };

/// Default configuration used when no --config is given: mu = 0.1,
/// R = 0.5, sigma = 0.1, sigma' = 0.12, every efficiency 0.1, no
/// polarization discrimination.
RawConfig default_config();

/// Runs the command line `args` (without the program name), writing
/// results to `out` and diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfqkd::cli
