#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fdlab::cli {

// Parse and execute one command line (without the program name).  Returns the
// process exit code: 0 on success, 2 on a usage or parameter rejection, 3 on a
// numerical or I/O failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fdlab::cli
