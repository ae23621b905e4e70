#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qhm::cli {

inline constexpr std::string_view kToolName = "qhm";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitUsageError = 2,
};

/// Entry point behind main(). args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qhm::cli
