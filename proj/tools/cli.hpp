#pragma once

#include <ostream>

namespace plasmon::cli {

/// Runs the command line. Exit codes: 0 success, 1 input or validation
/// error, 2 I/O error, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plasmon::cli
