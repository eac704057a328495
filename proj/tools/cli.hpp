#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hetero::cli {

// Runs one command line (program name excluded) and returns the exit code.
// Failures print a single "error: <category>: <message>" line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetero::cli
