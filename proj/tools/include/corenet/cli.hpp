#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corenet::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kNotFound = 2,
  kBadFormat = 3,
  kUsage = 4,
  kComputation = 5,
};

// Runs one subcommand. Data products go to `out` or files, diagnostics and
// the one-line error report to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

// "0.1..1.0" (step 0.1), "a..b:step", or a comma list.
std::vector<double> parse_fractions(const std::string& text);

}  // namespace corenet::cli
