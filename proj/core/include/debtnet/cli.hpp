#pragma once

#include <string>
#include <vector>

namespace debtnet::cli {

// Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

/// Full CLI dispatch; argv[0] is the program name. All diagnostics go to
/// stderr, tables and summaries to the --out directory.
int dispatch(const std::vector<std::string>& argv);
int dispatch(int argc, const char* const* argv);

}  // namespace debtnet::cli
