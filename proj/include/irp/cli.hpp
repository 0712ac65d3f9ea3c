#ifndef IRP_CLI_HPP
#define IRP_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace irp::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;  // audit or dominance check failed
inline constexpr int kExitUsage = 2;    // bad flags or malformed input

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace irp::cli

#endif  // IRP_CLI_HPP
