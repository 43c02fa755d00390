#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epf::cli {

/// Parses `args` (without the program name), runs the subcommand and
/// returns the process exit status: 0 on success, 2 for rejected
/// configuration or usage, 1 for data and computation errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epf::cli
