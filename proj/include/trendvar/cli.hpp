// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace trendvar {

/// Entry point for the `trendvar` command line. Returns the process exit
/// status: 0 on success, 1 usage, 2 data, 3 numeric failure. Diagnostics go
/// to `err` as a single line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trendvar
