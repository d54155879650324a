#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robinlab::cli {

/// Runs one command line (program name excluded). Returns 0 on success, 2 on
/// invalid input and 3 when a solver fails.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robinlab::cli
