#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tcr::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,  // also: no consistent price system found by check-cps
  kInputError = 2,
  kHypothesisFailed = 3,
};

/// Runs one `tcrobust` command. `args` excludes the program name. Reports go
/// to files under --out; a short summary goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcr::cli
