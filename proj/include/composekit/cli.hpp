#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace composekit::cli {

enum ExitStatus : int { kExitOk = 0, kExitValidation = 1, kExitUsage = 2 };

/// Runs one invocation. `args` excludes the program name. All output goes to
/// `out` and `err`; the only other side effects are files written to the
/// objdir by `setup` and baselines written by `test --record`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace composekit::cli
