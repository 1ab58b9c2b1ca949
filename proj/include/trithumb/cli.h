#ifndef TRITHUMB_CLI_H_
#define TRITHUMB_CLI_H_

#include <iosfwd>

#include "trithumb/error.h"

namespace trithumb {

// Process exit statuses.
enum ExitStatus : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitFormat = 3,
  kExitInfeasible = 4,
};

int ExitStatusFor(ErrorCode code);

// Runs the command line `argv` (argv[0] is the program name). Normal output
// goes to `out`, reports and diagnostics to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace trithumb

#endif  // TRITHUMB_CLI_H_
