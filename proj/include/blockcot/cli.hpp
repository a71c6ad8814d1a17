#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blockcot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitMalformedInput = 2;

// Runs one subcommand. `args` excludes the program name. "-" as an input or
// output path means `in` / `out`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace blockcot::cli
