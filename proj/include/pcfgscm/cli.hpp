#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace pcfgscm {

/// Exit codes: 0 success, 1 validation or domain error, 2 usage error.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitUsage = 2 };

/// Runs the command line `args` (without the program name). Reports go to
/// `out` unless --out names a file; diagnostics go to `err`; `audit` reads
/// the dataset from `in` when no file is given.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace pcfgscm
