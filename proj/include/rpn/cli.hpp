#pragma once
// Command-line front end: validate / simulate / antenna-experiment.

#include <iosfwd>
#include <string>
#include <vector>

namespace rpn::cli {

// Exit codes: 0 ok, 1 net validation failed, 2 file or guard parse error,
// 3 anything else (bad flags, disabled steps, I/O failures).
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_parse = 2;
inline constexpr int exit_runtime = 3;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);  // main() adapter, writes to stdout/stderr

}  // namespace rpn::cli
