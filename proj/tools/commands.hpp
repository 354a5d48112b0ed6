#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace modent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// True when the distance never grows with the parameter, in any listing order.
bool distance_nonincreasing(const std::vector<std::pair<double, double>>& rows);

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace modent::cli
