#ifndef VAXNET_TOOLS_CLI_HPP
#define VAXNET_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace vaxnet::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kInfeasible = 3;
inline constexpr int kLimit = 4;
inline constexpr int kIo = 5;

/// Runs one command line; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vaxnet::cli

#endif  // VAXNET_TOOLS_CLI_HPP
