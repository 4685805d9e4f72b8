#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace absorb {

inline constexpr const char* schema_tag = "absorb/1";

/// Runs the command line `args` (without the program name). JSON goes to
/// `out`, diagnostics to `err`. Returns 0 when the property holds, 1 when it
/// fails, 2 on input errors and 3 when a resource cap is exceeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace absorb
