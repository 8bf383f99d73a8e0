#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ivsel::cli {

enum ExitCode : int {
    kOk = 0,
    kRuntimeError = 1,
    kUsageError = 2,
    kDataError = 3,
};

/// Output directory used when --out is not given: $IVSEL_OUTPUT_DIR, else "ivsel-out".
std::string default_output_dir();

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace ivsel::cli
