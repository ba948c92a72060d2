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

#include <cstdint>
#include <random>

namespace quantbeam
{

/// What a random stream is used for. Part of the stream key so that, e.g.,
/// drawing more symbols never perturbs the channel draws.
enum class StreamTag : std::uint64_t
{
    UserChannels = 1,
    TargetResponse = 2,
    Symbols = 3,
    Noise = 4,
    Quantization = 5,
    Probe = 6,
    Detection = 7,
};

/// Random stream keyed by (seed, trial, tag).
///
/// The key is hashed with splitmix64 and expanded through std::seed_seq into
/// a mt19937_64 state, so streams for distinct keys are independent for all
/// practical purposes and any (seed, trial, tag) can be regenerated on its
/// own, in any order, on any thread.
class RngStream
{
public:
    RngStream(std::uint64_t seed, std::uint64_t trial, StreamTag tag);

    /// Derive an independent child stream (e.g. one per snapshot block).
    [[nodiscard]] RngStream split(std::uint64_t index) const;

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    /// Circularly-symmetric complex Gaussian with the given variance.
    cdouble complex_normal(double variance = 1.0);

    /// i.i.d. CN(0, variance) matrix.
    CMatrix complex_normal(Eigen::Index rows, Eigen::Index cols, double variance = 1.0);

    std::mt19937_64 &engine() { return engine_; }

private:
    RngStream(std::uint64_t key, int);

    std::uint64_t key_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace quantbeam
