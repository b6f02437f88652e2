#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace medchain::tools {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;     // parse, validation, unknown ids, missing files
inline constexpr int kExitInfeasible = 2;  // no feasible chain or dispatch, terminal state
inline constexpr int kExitReplay = 3;      // replay-check found a violation
inline constexpr int kExitUsage = 64;
inline constexpr int kExitInternal = 70;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace medchain::tools
