#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gmmk::cli {

// Runs one command line (args excludes the program name). Returns the
// process exit code: 0 success, 1 usage, 2 data error, 3 numeric error.
// Errors are written to err as a single "error: <kind>: <message>" line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gmmk::cli
