#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pchan::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kBadConfig = 2,
    kConvergence = 3,
};

/// Runs one subcommand. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv);

}  // namespace pchan::cli
