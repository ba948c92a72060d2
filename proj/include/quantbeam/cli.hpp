// SPDX-License-Identifier: Apache-2.0
//
// quantbeam: robust ISAC beamforming under low-resolution DACs/ADCs
// Copyright (C) 2026 The quantbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Batch front-end. Subcommands:
//
//   solve  one robust design (or one per --algorithms entry) on trial 0
//   sweep  algorithms along experiment.axis over experiment.grid
//   roc    energy-detector ROC with mid-rise converters
//   ee     energy efficiency over the bit grid
//   defaults  print the fully expanded default configuration
//
// Exit codes: 0 success, 1 unexpected error, 2 invalid configuration or
// arguments, 3 infeasible design, 4 solver failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace quantbeam::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitSolverFailure = 4;

/// Runs the tool; args[0] is the program name. Human-readable output goes to
/// `out`, diagnostics to `err`, data files to --out-dir.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Sets the global log level from QUANTBEAM_LOG (trace, debug, info, warn,
/// error, critical, off; default warn) and routes logs to stderr.
void configure_logging();

} // namespace quantbeam::cli
