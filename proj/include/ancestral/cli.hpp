#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ancestral::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumeric = 2;

/// Runs one subcommand. `args` excludes the program name. Artifacts go to the
/// --out path when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ancestral::cli
