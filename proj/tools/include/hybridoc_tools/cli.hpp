// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hybridoc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation; `args` excludes the program name.
/// Subcommands: validate, index, search, rerank, synth-demos, eval, sweep-lambda.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Values of an `a:b:step` grid, endpoints included.
std::vector<double> parse_grid(const std::string& spec);

/// File name used by sweep-lambda for one grid value, e.g. "run_lambda_0.25.tsv".
std::string sweep_run_name(double lambda);

}  // namespace hybridoc::cli
