#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oasis::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2 };

/// Runs one command line (args excludes the program name).
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace oasis::cli
