#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace noma_aoi {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;            // validation, usage, degenerate input
inline constexpr int kExitToleranceFailure = 2;  // compare outside tolerance

/// Runs the `noma-aoi` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace noma_aoi
