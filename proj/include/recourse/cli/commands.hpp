#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace recourse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;  // user or runtime error
inline constexpr int kExitUsage = 2;  // bad flags

// Subcommands: gen-data, train-classifier, train-autoencoder,
// train-countergan, benchmark, explain, serve. `args` excludes the program
// name. Never throws; failures map to the exit codes above.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace recourse
