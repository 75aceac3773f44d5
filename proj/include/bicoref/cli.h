#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bicoref {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNonFinite = 3;

// Entry point of the command-line tool. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bicoref
