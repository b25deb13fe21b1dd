#pragma once

#include <string>
#include <vector>

namespace emg {

// Entry point behind the `emg` binary; exposed so tests can drive subcommands
// in-process. Returns the process exit code; errors print one line to stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace emg
