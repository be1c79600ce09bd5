#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flowstep::cli {

enum ExitCode : int { kSuccess = 0, kCompareFailure = 1, kUsageError = 2, kIoError = 3 };

/// Default directory for figure bundles when --out is absent.
inline constexpr const char* kOutputDirEnv = "FLOWSTEP_OUTPUT_DIR";

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace flowstep::cli
