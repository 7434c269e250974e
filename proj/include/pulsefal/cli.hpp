#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pulsefal {

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Returns the process exit code: 0 success, 1 when `run
/// --expect-falsified` finds no counterexample, 2 on usage or configuration errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pulsefal
