#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dnufft_cli/commands.hpp"

namespace dnufft::cli {

/// Parses argv-style arguments (without the program name), runs the
/// subcommand and returns the process exit code: 0 success, 2 usage error,
/// 3 validation failure, 1 internal failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Hooks& hooks = {});

}  // namespace dnufft::cli
