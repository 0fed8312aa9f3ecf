#pragma once

#include <iosfwd>

namespace entrate::cli {

// Exit codes: 0 success, 1 input error, 2 numeric failure. Errors are
// reported on `err` as a single JSON object.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumeric = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace entrate::cli
