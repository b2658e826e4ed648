#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace byzrun {

// Exit codes: 0 all checks pass, 1 a check failed (or pending, unless
// allowed), 2 usage or scenario errors, 3 branch budget exhausted.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace byzrun
