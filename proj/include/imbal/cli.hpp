#pragma once

#include <iosfwd>

namespace imbal {

/// Exit codes: 0 success, 1 internal error, 2 invalid input or invocation,
/// 3 infeasible request.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace imbal
