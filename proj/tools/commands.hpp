#ifndef TRAJREC_TOOLS_COMMANDS_HPP_
#define TRAJREC_TOOLS_COMMANDS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace trajrec::cli {

// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kInternalError = 3,
};

// Runs `trajrec <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trajrec::cli

#endif  // TRAJREC_TOOLS_COMMANDS_HPP_
