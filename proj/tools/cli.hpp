#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace autotrack::cli {

/// Exit codes: 0 success, 1 a sequence (or frame) failed, 2 bad arguments.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace autotrack::cli
