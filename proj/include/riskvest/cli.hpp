#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riskvest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Entry point of the `riskvest` tool: solve | sweep | report | validate.
/// Results go to --out when given, else to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace riskvest::cli
