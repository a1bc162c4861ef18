#pragma once

#include <iosfwd>

namespace tte::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point of the `tte` tool. Exit codes: 0 success, 1 validation error,
/// 2 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tte::cli
