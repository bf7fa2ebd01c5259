#pragma once

#include <string>
#include <vector>

namespace plainwalk {

// Entry point shared by the binary and the tests. `args` excludes argv[0].
// Exit codes: 0 ok, 1 verification violations, 2 config errors, 3 numerical
// failures.
int run_cli(const std::vector<std::string>& args);

}  // namespace plainwalk
