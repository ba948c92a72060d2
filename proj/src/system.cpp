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

#include "quantbeam/system.hpp"

#include "quantbeam/units.hpp"

#include <cmath>

namespace quantbeam
{

SystemConfig SystemConfig::defaults()
{
    SystemConfig c;
    c.power_w = units::dbm_to_watts(20.0);
    c.gamma = RVector::Constant(c.n_users, units::db_to_linear(5.0));
    c.sigma_r2 = units::dbm_to_watts(0.0);
    c.sigma_k2 = units::dbm_to_watts(0.0);
    c.bits = BitAllocation::uniform(c.n_tx, c.n_rx, c.n_users, BitDepth::finite(3));
    return c;
}

void SystemConfig::validate() const
{
    require(n_tx >= 1 && n_rx >= 1 && n_users >= 0, "system: antenna and user counts must be positive");
    require(power_w > 0.0, "system: power budget must be positive");
    require(sigma_r2 > 0.0 && sigma_k2 > 0.0, "system: noise powers must be positive");
    require(gamma.size() == n_users, "system: need one SQINR threshold per user");
    for (Eigen::Index k = 0; k < gamma.size(); ++k)
        require(gamma(k) > 0.0, "system: SQINR thresholds must be positive");
    bits.validate();
    require(static_cast<int>(bits.dac_bits.size()) == n_tx, "system: need one DAC resolution per transmit chain");
    require(static_cast<int>(bits.adc_bits_bs.size()) == n_rx, "system: need one ADC resolution per receive chain");
    require(static_cast<int>(bits.adc_bits_user.size()) == n_users, "system: need one ADC resolution per user");
}

PointTarget default_point_target()
{
    return PointTarget{units::deg_to_rad(40.0), cdouble(std::sqrt(units::db_to_linear(-10.0)), 0.0)};
}

ExtendedTarget default_extended_target()
{
    return ExtendedTarget{units::db_to_linear(-10.0)};
}

void Scenario::validate() const
{
    config.validate();
    require(channels.n_users() == config.n_users, "scenario: channel count differs from user count");
    require(channels.H.cols() == config.n_tx, "scenario: user channels have the wrong length");
    require(channels.G.rows() == config.n_rx && channels.G.cols() == config.n_tx,
            "scenario: target response has the wrong shape");
    require(profile.alpha_t.size() == config.n_tx && profile.alpha_r.size() == config.n_rx &&
                profile.alpha_user.size() == config.n_users,
            "scenario: quantization profile has the wrong shape");
    for (int k = 0; k < config.n_users; ++k)
        require(channels.H.row(k).squaredNorm() > 0.0, "scenario: user channel is identically zero");
}

Scenario make_scenario(const SystemConfig &config, const ChannelSet &channels)
{
    Scenario s{config, channels, build_profile(config.bits)};
    s.validate();
    return s;
}

void check_sqinr_ceilings(const Scenario &scenario)
{
    std::vector<UserDiagnostic> diag;
    bool bad = false;
    for (int k = 0; k < scenario.config.n_users; ++k)
    {
        const double ceiling = sqinr_ceiling(scenario.profile.alpha_user(k));
        const double gamma = scenario.config.gamma(k);
        diag.push_back({k, gamma, ceiling, std::numeric_limits<double>::quiet_NaN()});
        bad = bad || gamma >= ceiling;
    }
    if (bad)
        throw InfeasibleError("SQINR threshold at or above the ADC ceiling alpha/(1 - alpha)", std::move(diag));
}

} // namespace quantbeam
