#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace foundad::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs the foundad command line. `args` excludes the program name. Returns
/// 0 on success, 1 on runtime failure and 2 on usage or validation errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace foundad::cli
