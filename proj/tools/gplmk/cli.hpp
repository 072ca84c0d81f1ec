#pragma once

#include <string>
#include <vector>

namespace gplmk::cli {

// Name of the environment variable holding the default config file path.
inline constexpr const char* kConfigEnv = "GPLMK_CONFIG";

// Runs the command line; returns the process exit code
// (0 ok, 1 input, 2 topology/precondition, 3 numerical).
int run(int argc, char** argv);
// args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace gplmk::cli
