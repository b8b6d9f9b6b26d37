#pragma once

// Command-line front end. Exit codes: 0 pass, 1 experiment failure,
// 2 argument error, 3 numerical error.

#include <iosfwd>
#include <string>
#include <vector>

namespace fbindex::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Convenience for tests: args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fbindex::cli
