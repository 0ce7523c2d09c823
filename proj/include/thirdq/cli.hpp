#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thirdq::cli {

/// Run one command-line invocation. `args` is the argument list without the
/// program name. Human-readable results go to `out`, diagnostics to `err`,
/// and a JSON run report to the file named by --report when given.
/// Returns the process exit code: 0 success, 1 domain error, 2 usage error.
int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace thirdq::cli
