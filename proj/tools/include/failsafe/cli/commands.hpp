#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace failsafe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Bad flag combination detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs one invocation of the `failsafe` tool. `args` excludes the program
// name. Artifacts addressed to "-" go to `out`; diagnostics go to `err`.
// Returns 0 on success, 1 on a computation or I/O failure, 2 on a usage error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace failsafe::cli
