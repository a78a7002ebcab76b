#ifndef ECHOFORGE_CLI_CLI_H_
#define ECHOFORGE_CLI_CLI_H_

#include <ostream>

namespace echoforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitConfig = 3;

// Entry point of the `echoforge` tool; returns the process exit code.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace echoforge::cli

#endif  // ECHOFORGE_CLI_CLI_H_
