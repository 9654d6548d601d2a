#pragma once

#include <iosfwd>

namespace cwm::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kDataError = 3;
inline constexpr int kNumericalError = 4;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cwm::cli
