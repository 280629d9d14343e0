#pragma once

// Command-line front end.  Exit codes: 0 success, 2 input error, 3 numeric
// nonconvergence.

#include <string>
#include <vector>

namespace specdet {

int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace specdet
