#pragma once

#include <string>
#include <vector>

namespace ncamgm {

// Runs one CLI invocation. Exit codes:
//   0  all checks pass
//   1  violation flagged (potential counterexample; instance serialized)
//   2  usage or input error
//   3  numerical failure
int run_cli(const std::vector<std::string>& args);

}  // namespace ncamgm
