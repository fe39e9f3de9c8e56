#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace greenprem::cli {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_runtime = 2 };

/// Runs one subcommand. `args` excludes the program name. CSV goes to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace greenprem::cli
