#ifndef MLDP_CLI_HPP
#define MLDP_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace mldp {

inline constexpr const char* kVersion = "mldp 0.1.0";

// Exit codes beyond the report's 0/1/2.
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitBudget = 66;

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mldp

#endif  // MLDP_CLI_HPP
