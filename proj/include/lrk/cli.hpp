#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lrk::cli {

/// Exit codes: 0 success, 1 numerical failure, 2 invalid input.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable consulted for the worker count when neither the flag
/// nor the config file sets it.
inline constexpr const char* kWorkersEnv = "LRK_WORKERS";

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

/// Accepts a decimal number or a fraction such as "2/3".
double parse_alpha(const std::string& text);

}  // namespace lrk::cli
