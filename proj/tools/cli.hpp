#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rqfi::cli {

enum ExitCode { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

/// s-grid from `min:max:points[@geometric]`, a comma list, or a single value.
std::vector<double> parse_grid(const std::string& spec);

/// Runs `rqfi <args...>`; results go to `out` unless --output names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rqfi::cli
