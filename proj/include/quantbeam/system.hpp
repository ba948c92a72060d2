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

#include "quantbeam/channel.hpp"
#include "quantbeam/linalg.hpp"
#include "quantbeam/quantization.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace quantbeam
{

/// Physical link parameters, all in linear units.
struct SystemConfig
{
    int n_tx = 16;
    int n_rx = 16;
    int n_users = 4;
    double power_w = 0.1;  ///< transmit power budget P
    RVector gamma;         ///< SQINR thresholds, one per user
    double sigma_r2 = 1e-3; ///< BS receiver noise power
    double sigma_k2 = 1e-3; ///< user noise power
    BitAllocation bits;

    /// N_T = N_R = 16, K = 4, P = 20 dBm, 5 dB thresholds, 0 dBm noise,
    /// 3-bit converters everywhere.
    static SystemConfig defaults();

    /// Throws std::invalid_argument on inconsistent sizes or nonpositive
    /// powers.
    void validate() const;
};

/// Default point target: 40 degrees, |eta|^2 = -10 dB.
PointTarget default_point_target();

/// Default extended target: sigma_g^2 = -10 dB.
ExtendedTarget default_extended_target();

/// Everything a solver needs for one instance.
struct Scenario
{
    SystemConfig config;
    ChannelSet channels;
    QuantizationProfile profile;

    /// Checks dimensions across the three parts and rejects zero user
    /// channels.
    void validate() const;
};

/// Scenario with the profile built from config.bits.
Scenario make_scenario(const SystemConfig &config, const ChannelSet &channels);

/// Largest SQINR user k can reach with unlimited power: alpha_k / (1 - alpha_k)
/// (infinite for an ideal ADC).
inline double sqinr_ceiling(double alpha_k)
{
    return alpha_k >= 1.0 ? std::numeric_limits<double>::infinity() : alpha_k / (1.0 - alpha_k);
}

struct UserDiagnostic
{
    int user = 0;
    double gamma = 0.0;   ///< requested threshold (linear)
    double ceiling = 0.0; ///< sqinr_ceiling of the user's ADC
    double margin = 0.0;  ///< best achievable constraint slack (normalized), NaN if not computed
};

/// The SQINR thresholds cannot be met within the power budget.
class InfeasibleError : public std::runtime_error
{
public:
    InfeasibleError(const std::string &what, std::vector<UserDiagnostic> users)
        : std::runtime_error(what), users_(std::move(users))
    {
    }

    [[nodiscard]] const std::vector<UserDiagnostic> &users() const { return users_; }

private:
    std::vector<UserDiagnostic> users_;
};

/// The numerical solver stopped without a certified answer.
class SolverFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Throws InfeasibleError listing every user whose threshold reaches the
/// ADC ceiling.
void check_sqinr_ceilings(const Scenario &scenario);

} // namespace quantbeam
