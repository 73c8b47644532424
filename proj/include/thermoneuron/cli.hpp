#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thermoneuron::cli {

/// Exit codes: 0 success, 1 verification or runtime failure, 2 usage/config error.
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kUsage = 2;

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count for grid evaluation: THERMONEURON_THREADS if set, else the
/// hardware concurrency.
unsigned worker_count();

}  // namespace thermoneuron::cli
