#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modclass {

/// Runs one command line (argv[0] is the program name). Exit status: 0 on
/// success, 2 for usage and config errors, 1 for runtime failures.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* tool_version();

}  // namespace modclass
