#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dxtrust {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitUsage = 64;

/// Runs one command line (program name excluded) and returns the exit status:
/// 0 success, 1 invalid input, 2 runtime error or any failed item, 64 usage.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

}  // namespace dxtrust
