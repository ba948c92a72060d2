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

// JSON run configuration shared by the command-line tool and the Python
// module, plus JSON views of channels and solutions.
//
// Physical quantities carry their unit in the key name (power_dbm, gamma_db,
// theta_deg, p_rf_mw, ...). Every key is optional; omitted keys take the
// library defaults, unknown keys are rejected.

#include "quantbeam/metrics.hpp"
#include "quantbeam/sim.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace quantbeam
{

/// Malformed or inconsistent configuration. what() names the offending key.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig
{
    ExperimentSpec spec;
    PowerModel power_model = default_power_model();
    std::string sdr_engine = "barrier";
    bool grid_given = false; ///< "experiment.grid" was present

    /// Converter and RF figures used when "power_model" is omitted.
    static PowerModel default_power_model();
};

/// Parses a JSON document. Throws ConfigError on syntax errors, unknown keys,
/// wrong types and values the library rejects.
RunConfig parse_run_config(const std::string &json_text);

/// Fully expanded configuration (every key present, fixed key order). Parsing
/// the output reproduces the configuration up to dB round-off.
std::string canonical_json(const RunConfig &config, int indent = 2);

/// FNV-1a 64 of the compact canonical JSON with threads zeroed, as 16 hex
/// digits.
std::string config_hash(const RunConfig &config);

/// Default sweep grid of an axis: gamma_db 5..12, power_dbm 10..30 step 5,
/// antennas 4..16 step 4, bits 1..8.
std::vector<double> default_grid(SweepAxis axis);

/// Complex entries are written as [re, im]; matrices as arrays of rows.
std::string to_json(const ChannelSet &channels, int indent = 2);
ChannelSet channels_from_json(const std::string &json_text);

/// Beamformers, covariance, metrics (linear and dB) and solver diagnostics.
std::string to_json(const BeamformingSolution &solution, int indent = 2);

/// Reads W_c and W_r back and recomputes every metric on `scenario`.
BeamformingSolution solution_from_json(const std::string &json_text, const Scenario &scenario);

} // namespace quantbeam
