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

#include "quantbeam/channel.hpp"

#include <cmath>
#include <numbers>

namespace quantbeam
{

namespace
{

CVector steering(double theta, int n, double sign)
{
    require(n >= 1, "steering vector needs at least one antenna");
    CVector v(n);
    const double phase = sign * std::numbers::pi * std::sin(theta);
    for (int m = 0; m < n; ++m)
        v(m) = std::polar(1.0, phase * m);
    return v;
}

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};

} // namespace

void validate_target(const TargetModel &target)
{
    std::visit(overloaded{
                   [](const PointTarget &p) {
                       require(std::norm(p.eta) > 0.0, "point target needs |eta|^2 > 0");
                   },
                   [](const ExtendedTarget &e) {
                       require(e.sigma_g2 > 0.0, "extended target needs sigma_g2 > 0");
                   },
                   [](const CustomTarget &c) { require(c.G.size() > 0, "custom target needs a non-empty G"); },
               },
               target);
}

CVector steering_tx(double theta, int n)
{
    return steering(theta, n, -1.0);
}

CVector steering_rx(double theta, int n)
{
    return steering(theta, n, +1.0);
}

CMatrix make_trm(const TargetModel &target, int n_rx, int n_tx, RngStream &rng)
{
    validate_target(target);
    return std::visit(
        overloaded{
            [&](const PointTarget &p) -> CMatrix {
                return p.eta * steering_rx(p.theta, n_rx) * steering_tx(p.theta, n_tx).adjoint();
            },
            [&](const ExtendedTarget &e) -> CMatrix { return rng.complex_normal(n_rx, n_tx, e.sigma_g2); },
            [&](const CustomTarget &c) -> CMatrix {
                if (c.G.rows() != n_rx || c.G.cols() != n_tx)
                    throw std::invalid_argument("custom target response has wrong dimensions");
                return c.G;
            },
        },
        target);
}

CMatrix rayleigh_channels(int n_users, int n_tx, RngStream &rng)
{
    require(n_users >= 0 && n_tx >= 1, "rayleigh_channels: bad dimensions");
    return rng.complex_normal(n_users, n_tx, 1.0);
}

ChannelSet draw_channels(const TargetModel &target, int n_users, int n_tx, int n_rx,
                         std::uint64_t seed, std::uint64_t trial)
{
    RngStream users(seed, trial, StreamTag::UserChannels);
    RngStream trm(seed, trial, StreamTag::TargetResponse);
    ChannelSet cs;
    cs.H = rayleigh_channels(n_users, n_tx, users);
    cs.G = make_trm(target, n_rx, n_tx, trm);
    cs.target = target;
    cs.seed = seed;
    return cs;
}

} // namespace quantbeam
