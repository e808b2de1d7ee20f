#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relaysel {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

// Runs one subcommand. `args` excludes the program name. Results go to `out`
// (or to the --out file); diagnostics and usage text go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relaysel
