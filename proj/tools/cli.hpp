#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kelm::cli {

/// Runs one command line (args excludes the program name).
///
/// Exit codes: 0 success, 1 flag or data errors, 2 numeric failures such as a
/// singular solve.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kelm::cli
