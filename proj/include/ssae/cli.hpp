#ifndef SSAE_CLI_HPP
#define SSAE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ssae::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kData = 2;
inline constexpr int kNumerical = 3;

/// Runs the `ssae` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssae::cli

#endif  // SSAE_CLI_HPP
