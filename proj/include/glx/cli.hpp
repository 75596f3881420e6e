#pragma once

// Command-line front end. run_cli is the real entry point (main() is a thin
// wrapper) so tests can drive subcommands in-process and observe exit codes:
//   0 success, 1 I/O or usage errors, 2 conditions failed for --method closed.

#include <string>
#include <vector>

namespace glx {

int run_cli(const std::vector<std::string>& args);

}  // namespace glx
