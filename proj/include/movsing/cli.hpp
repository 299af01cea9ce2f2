#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace movsing {

/// Exit codes: 0 success, 2 input error, 3 internal inconsistency.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace movsing
