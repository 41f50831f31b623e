#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tasched::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (argv[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int cmd_execute(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tasched::cli
