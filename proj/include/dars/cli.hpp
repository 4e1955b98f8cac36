#pragma once

#include <string>
#include <vector>

namespace dars::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes, kept distinct so sweep scripts can branch on them.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;       // parse/config/usage problems
inline constexpr int kExitInfeasible = 3;  // solver ran, no feasible valued outcome
inline constexpr int kExitCapacity = 4;    // exact-solve size limit hit

// Runs the command line given as arguments (without the program name).
int run(const std::vector<std::string>& args);

}  // namespace dars::cli
