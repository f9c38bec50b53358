#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nfres::cli {

// Exit codes shared by the CLI and the library dispatch.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;  // bad flags, bad files, bad parameters
inline constexpr int kExitNumeric = 3;     // solver/fit failures

// Dispatches one toolkit invocation. `args` excludes the program name.
// All human/machine readable results go to `out`, diagnostics to `err`.
// The default configuration can be replaced by --config <file> or the
// NFRES_CONFIG environment variable.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nfres::cli
