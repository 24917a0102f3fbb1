#pragma once

#include <ostream>

namespace simcmp::cli {

/// Runs one `simcmp` invocation and returns its exit code:
/// 0 success, 2 usage or config error, 3 data or format error, 4 I/O error.
/// Machine output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace simcmp::cli
