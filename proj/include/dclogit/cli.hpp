#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dclogit {

/// Exit codes: 0 success, 1 validation or usage error, 2 solver or
/// representability failure.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitSolver = 2 };

/// Runs the command line. args excludes the program name. The relative
/// tolerance defaults to DCLOGIT_TOLERANCE when set; --tol overrides both.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dclogit
