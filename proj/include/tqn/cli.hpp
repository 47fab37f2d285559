#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tqn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime or I/O failure
inline constexpr int kExitUsage = 2;    // bad arguments or configuration

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tqn::cli
