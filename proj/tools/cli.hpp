#pragma once

#include <ostream>

namespace nvtwist::cli {

/// Exit codes: 0 success, 1 internal error, 2 invalid input or precondition.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nvtwist::cli
