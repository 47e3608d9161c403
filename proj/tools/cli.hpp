#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace poslin::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kValidationFailed = 2;
inline constexpr int kDiverged = 3;
inline constexpr int kIterLimit = 4;

/// Runs one invocation. `args` excludes the program name. Output files named
/// by --output are written directly; everything else goes to `out`/`err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace poslin::cli
