#pragma once

#include <ostream>

namespace gridrecover::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one CLI invocation. Exit codes: 0 success, 1 runtime failure (or a
/// recovery that misses tol), 2 usage or input parse errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gridrecover::cli
