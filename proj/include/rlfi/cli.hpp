#ifndef RLFI_CLI_HPP_
#define RLFI_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace rlfi {

// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rlfi

#endif  // RLFI_CLI_HPP_
