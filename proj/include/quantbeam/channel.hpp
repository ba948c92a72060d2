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

#include "quantbeam/linalg.hpp"
#include "quantbeam/rng.hpp"

#include <cstdint>
#include <variant>

namespace quantbeam
{

/// Single scatterer at angle theta (radians) with reflection coefficient eta.
struct PointTarget
{
    double theta = 0.0;
    cdouble eta{1.0, 0.0};
};

/// Extended target: i.i.d. CN(0, sigma_g2) response entries.
struct ExtendedTarget
{
    double sigma_g2 = 0.1;
};

/// Caller-supplied N_R x N_T response matrix.
struct CustomTarget
{
    CMatrix G;
};

using TargetModel = std::variant<PointTarget, ExtendedTarget, CustomTarget>;

/// Throws std::invalid_argument for |eta| = 0 or sigma_g2 <= 0.
void validate_target(const TargetModel &target);

inline bool is_point(const TargetModel &t) { return std::holds_alternative<PointTarget>(t); }

/// Channels of one realization.
struct ChannelSet
{
    CMatrix H; ///< K x N_T, row k holds h_k^H
    CMatrix G; ///< N_R x N_T target response matrix
    TargetModel target;
    std::uint64_t seed = 0;

    [[nodiscard]] int n_users() const { return static_cast<int>(H.rows()); }
    [[nodiscard]] int n_tx() const { return static_cast<int>(G.cols()); }
    [[nodiscard]] int n_rx() const { return static_cast<int>(G.rows()); }

    /// Channel vector h_k (column), i.e. the conjugate transpose of row k of H.
    [[nodiscard]] CVector user(int k) const { return H.row(k).adjoint(); }
};

/// a(theta): entry m = exp(-j pi m sin theta).
CVector steering_tx(double theta, int n);

/// b(theta): entry m = exp(+j pi m sin theta).
CVector steering_rx(double theta, int n);

/// Point: eta b(theta) a(theta)^H; Extended: i.i.d. CN(0, sigma_g2);
/// Custom: passthrough (dimensions checked).
CMatrix make_trm(const TargetModel &target, int n_rx, int n_tx, RngStream &rng);

/// K x N_T matrix of i.i.d. CN(0, 1) entries.
CMatrix rayleigh_channels(int n_users, int n_tx, RngStream &rng);

/// Draw a full ChannelSet for trial `trial` of a run seeded with `seed`.
/// The user channels and the target response use separate streams.
ChannelSet draw_channels(const TargetModel &target, int n_users, int n_tx, int n_rx,
                         std::uint64_t seed, std::uint64_t trial = 0);

} // namespace quantbeam
