#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dupliq::cli {

/// Exit codes: 0 success, 1 usage or contract error, 2 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitContract = 1;
inline constexpr int kExitIo = 2;

/// Runs one subcommand; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace dupliq::cli
