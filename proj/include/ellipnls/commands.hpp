#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ellipnls/runconfig.hpp"

namespace ellipnls {

inline constexpr const char* kVersion = "0.1.0";

std::vector<std::string> command_names();

/// Execute one CLI command. Returns the process exit code:
/// 0 = all checks within tolerance, 2 = reproduction discrepancies found
/// (reproduce-appendix and ssfm-check), throws ellipnls::Error on hard failures
/// (mapped to exit code 1 by the frontend).
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

}  // namespace ellipnls
