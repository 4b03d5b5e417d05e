#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flexent {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,       // unknown subcommand or bad flags
    kExitInfeasible = 2,  // the plan does not meet the objective's constraints
    kExitInvalid = 3,     // scenario or input file rejected
    kExitConflict = 4,    // session version conflict
    kExitInternal = 70,
};

/// Command-line driver. `args` excludes the program name, e.g.
/// {"--scenario", "s.json", "plan", "--policy", "full-flex"}.
/// Machine-readable results go to `out`, diagnostics to `err`; with
/// --session they are also stored as artifacts of the scenario version.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flexent
