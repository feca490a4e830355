#pragma once

#include <iosfwd>

namespace deployopt::cli {

/// Runs the command line. Failures print exactly one line
/// `error: <CODE>: <message>` to `err`; exit status is 0 on success, 1 for
/// runtime errors, 2 for usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace deployopt::cli
