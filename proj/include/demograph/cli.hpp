#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace demograph {

enum ExitCode : int { ExitOk = 0, ExitValidation = 1, ExitIo = 2 };

/// Runs one subcommand. `args` excludes the program name.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_run(int argc, const char* const* argv);

}  // namespace demograph
