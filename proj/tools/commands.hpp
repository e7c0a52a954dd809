#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace phaseloss::cli {

enum ExitCode { kSuccess = 0, kCheckFailed = 1, kUsage = 2 };

/// Parses args (without the program name) and runs the selected subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal representation, independent of the locale.
std::string format_number(double x);

}  // namespace phaseloss::cli
