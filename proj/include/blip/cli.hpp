#pragma once

#include <string>
#include <vector>

namespace blip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< identity violation or failed check
inline constexpr int kExitConfig = 2;   ///< bad flags, ranges or budgets

int run(int argc, char** argv);
/// `args` excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace blip::cli
