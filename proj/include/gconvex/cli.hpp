#pragma once

#include <ostream>

namespace gcx::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalAbort = 3, kValidationFailure = 4 };

/// Entry point of the gconvex tool. Subcommands: auction, ot, validate,
/// export-grid. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gcx::cli
