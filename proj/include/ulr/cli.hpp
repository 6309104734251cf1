#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ulr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsageError = 2;

// Runs one command line (args exclude the program name). Diagnostics go to
// `err` as a single line; help text goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ulr::cli
