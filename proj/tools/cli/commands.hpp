#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kpg::cli {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 success, 1 unexpected failure, 2 config or usage error,
/// 3 data error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kpg::cli
