#pragma once

#include <ostream>

namespace qoe::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInvalid = 1;  // validation, range, or fitting failure
inline constexpr int kIoError = 2;  // unreadable, undecodable, or malformed input

// Runs the `qoe` command line with argv[0] as the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qoe::cli
