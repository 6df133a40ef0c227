#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace passivity::cli {

// Exit codes of the command-line tool.
inline constexpr int kPass = 0;
inline constexpr int kUsage = 1;
inline constexpr int kRefuted = 2;
inline constexpr int kInconclusive = 3;
// The certificate and the sampling oracle contradict each other.
inline constexpr int kDisagreement = 4;

/// Runs one command. args excludes the program name. Reports go to out as JSON.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace passivity::cli
