#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lcid {

/// Exit codes returned by run().
enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitNumerical = 2 };

/// Parses args (without the program name) and executes one subcommand.
/// Reports go to --out when given, otherwise to `out`; messages and usage
/// go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lcid
