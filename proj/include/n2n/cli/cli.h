// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef N2N_CLI_CLI_H_
#define N2N_CLI_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace n2n::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

// Effective flags of a run, written next to its outputs.
inline constexpr char kRunConfigFile[] = "run_config.ini";

// Runs `n2nvc` with `args` (without the program name). Subcommands: mix,
// train-denoiser, train-vc, convert, evaluate.
int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace n2n::cli

#endif  // N2N_CLI_CLI_H_
