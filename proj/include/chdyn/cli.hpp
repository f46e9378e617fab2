#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chdyn {

enum ExitCode { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

// Runs the command line `args` (without the program name). Subcommands:
// convergence, evolve, mesh. Returns one of ExitCode.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace chdyn
