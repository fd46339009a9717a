#pragma once

#include <string>
#include <vector>

namespace aiid {

// Exit codes: 0 success / all checks pass, 1 check failure, 2 parse error,
// 3 guard violation, 4 solver failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace aiid
