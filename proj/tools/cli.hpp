#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace momscale::cli {

/// Runs one CLI invocation. argv[0] is the program name. Returns the process
/// exit status: 0 on success, 1 on analysis errors, 2 on usage errors and
/// 3 when an output failed its invariant checks.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace momscale::cli
