#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opmaj {

// Dispatches one command line (without the program name). Exit codes:
// 0 verdict true / run passed, 1 verdict false / run failed, 2 usage or
// file trouble, 3 any other refused precondition.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace opmaj
