#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phyp::cli {

enum ExitCode : int {
    success = 0,
    config_error = 2,
    hypothesis_failure = 3,
    non_convergence = 4,
    io_error = 5,
};

/// Entry point of the `phyp` tool; argv excludes the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace phyp::cli
