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

#include "quantbeam/rng.hpp"

#include <cmath>

namespace quantbeam
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t key)
{
    std::uint64_t a = splitmix64(key);
    std::uint64_t b = splitmix64(a);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t trial, StreamTag tag)
    : RngStream(splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ static_cast<std::uint64_t>(tag)), 0)
{
}

RngStream::RngStream(std::uint64_t key, int) : key_(key), engine_(make_engine(key)) {}

RngStream RngStream::split(std::uint64_t index) const
{
    return RngStream(splitmix64(key_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)), 0);
}

cdouble RngStream::complex_normal(double variance)
{
    const double s = std::sqrt(0.5 * variance);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
}

CMatrix RngStream::complex_normal(Eigen::Index rows, Eigen::Index cols, double variance)
{
    CMatrix m(rows, cols);
    // column-major fill order is part of the reproducibility contract
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = complex_normal(variance);
    return m;
}

} // namespace quantbeam
