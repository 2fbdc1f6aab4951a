#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ntw::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDiverged = 1;
inline constexpr int kUsage = 2;

/// Runs one invocation (args excludes the program name). Output goes to out/err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ntw::cli
