#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace feedback_lens::cli {

enum ExitCode { kOk = 0, kValidationError = 1, kIoError = 2 };

/// Runs one subcommand. `args` excludes the program name. Data goes to files
/// or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace feedback_lens::cli
