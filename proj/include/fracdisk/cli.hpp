#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fracdisk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Runs one command line (without the program name), e.g. {"dk", "--alpha", "0.5"}.
// Results go to `out` unless the configuration names an output file; messages
// and generated seeds go to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracdisk::cli
