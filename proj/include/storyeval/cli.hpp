#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace storyeval {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `storyeval` binary. `args` excludes the program
/// name. Returns 0 on success, 1 on invalid input data, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace storyeval
