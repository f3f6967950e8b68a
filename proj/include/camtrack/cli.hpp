#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace camtrack::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kDataError = 2,
    kInternal = 3,
};

/// Entry point of the camtrack binary; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace camtrack::cli
