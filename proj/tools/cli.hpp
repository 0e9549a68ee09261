#ifndef SEGLOSS_TOOLS_CLI_HPP
#define SEGLOSS_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace segloss::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kUsage = 2,
    kShapeMismatch = 3,
};

/// Runs one command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace segloss::cli

#endif  // SEGLOSS_TOOLS_CLI_HPP
