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

#include "quantbeam/quantization.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace quantbeam;

namespace
{

double phi(double x) { return std::isinf(x) ? 0.0 : std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Lloyd-Max design for N(0, 1) by alternating centroid and midpoint
/// updates, with the cell moments in closed form.
double lloyd_max_mse(int bits)
{
    const int levels = 1 << bits;
    std::vector<double> r(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i)
        r[static_cast<std::size_t>(i)] = -2.0 + 4.0 * (i + 0.5) / levels;
    std::vector<double> t(static_cast<std::size_t>(levels + 1));
    double mse = 0.0;
    for (int it = 0; it < 20000; ++it)
    {
        t.front() = -INFINITY;
        t.back() = INFINITY;
        for (int i = 1; i < levels; ++i)
            t[static_cast<std::size_t>(i)] = 0.5 * (r[static_cast<std::size_t>(i - 1)] + r[static_cast<std::size_t>(i)]);
        mse = 1.0;
        for (int i = 0; i < levels; ++i)
        {
            const double lo = t[static_cast<std::size_t>(i)], hi = t[static_cast<std::size_t>(i + 1)];
            const double p = cdf(hi) - cdf(lo);
            const double m1 = phi(lo) - phi(hi);
            r[static_cast<std::size_t>(i)] = m1 / p;
            // E[(x - c)^2 ; cell] summed gives 1 - sum p c^2 at the centroids
            mse -= m1 * m1 / p;
        }
    }
    return mse;
}

double sample_mse(const MidriseQuantizer &q, int n, RngStream &rng)
{
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double x = rng.normal();
        const double e = q.quantize(x, 1.0) - x;
        acc += e * e;
    }
    return acc / n;
}

} // namespace

TEST_CASE("distortion factor matches a Lloyd-Max design")
{
    for (int b = 1; b <= 5; ++b)
    {
        CAPTURE(b);
        const double oracle = lloyd_max_mse(b);
        // the classic 5-bit entry sits 0.23% below the converged design
        const double tol = b == 5 ? 3e-3 : 1e-3;
        CHECK(relative_difference(distortion_factor(b), oracle) < tol);
    }
    CHECK(distortion_factor(1) == doctest::Approx(0.3634).epsilon(1e-12));
}

TEST_CASE("distortion factor: asymptotic law and limits")
{
    CHECK(distortion_factor(6) == doctest::Approx(6.6423e-4).epsilon(1e-4));
    CHECK(distortion_factor(BitDepth::infinite()) == 0.0);
    CHECK_THROWS_AS(distortion_factor(0), std::invalid_argument);
    CHECK_THROWS_AS(distortion_factor(-2), std::invalid_argument);
    CHECK_THROWS_AS(BitDepth::finite(0), std::invalid_argument);
    for (int b = 1; b < 16; ++b)
    {
        CAPTURE(b);
        CHECK(distortion_factor(b) >= 0.0);
        CHECK(distortion_factor(b) < 1.0);
        CHECK(distortion_factor(b + 1) < distortion_factor(b));
        if (b >= 5)
            CHECK(distortion_factor(b + 1) < distortion_factor(b) / 3.0);
    }
}

TEST_CASE("profiles")
{
    const auto ideal = build_profile(BitAllocation::ideal(4, 3, 2));
    CHECK((ideal.gain_tx() - CMatrix::Identity(4, 4)).norm() == 0.0);
    CHECK((ideal.gain_rx() - CMatrix::Identity(3, 3)).norm() == 0.0);
    CHECK((ideal.alpha_user.array() == 1.0).all());

    const auto three = build_profile(BitAllocation::uniform(4, 3, 2, BitDepth::finite(3)));
    CHECK(three.alpha_t(0) == doctest::Approx(0.96546).epsilon(1e-12));
    CHECK(three.uniform_alpha_t().has_value());

    BitAllocation mixed = BitAllocation::uniform(16, 16, 4, BitDepth::finite(3));
    mixed.dac_bits[14] = mixed.dac_bits[15] = BitDepth::finite(10);
    CHECK(!mixed.uniform_dac());
    const auto p = build_profile(mixed);
    const double hi = 1.0 - std::sqrt(3.0) * std::numbers::pi / 2.0 * std::exp2(-20.0);
    for (int n = 0; n < 14; ++n)
        CHECK(p.alpha_t(n) == doctest::Approx(1.0 - 0.03454).epsilon(1e-12));
    CHECK(p.alpha_t(14) == doctest::Approx(hi).epsilon(1e-14));
    CHECK(p.alpha_t(15) == doctest::Approx(hi).epsilon(1e-14));
    CHECK(!p.uniform_alpha_t().has_value());
}

TEST_CASE("AQNM noise covariances")
{
    CMatrix rx = CMatrix::Identity(3, 3);
    CHECK(dac_noise_cov(RVector::Ones(3), rx).norm() == 0.0);
    CHECK((dac_noise_cov(RVector::Constant(3, 0.5), rx) - 0.25 * CMatrix::Identity(3, 3)).norm() < 1e-15);
    CHECK(bs_adc_noise_cov(RVector::Ones(3), 2.0 * rx).norm() == 0.0);
    CHECK((bs_adc_noise_cov(RVector::Constant(3, 0.9), 2.0 * rx) - 0.18 * CMatrix::Identity(3, 3)).norm() < 1e-14);
    CHECK_THROWS_AS(dac_noise_cov(RVector::Ones(2), rx), std::invalid_argument);

    // random R_x: the result is real, diagonal and nonnegative, and the
    // sampler reproduces it
    RngStream rng(5, 0, StreamTag::Probe);
    const CMatrix w = rng.complex_normal(4, 4);
    const CMatrix r = w * w.adjoint();
    const auto prof = build_profile(BitAllocation::uniform(4, 1, 0, BitDepth::finite(3)));
    const CMatrix q = dac_noise_cov(prof.alpha_t, r);
    CHECK((q - diag_part(q)).norm() == 0.0);
    CHECK(q.diagonal().imag().norm() == 0.0);
    CHECK((q.diagonal().real().array() >= 0.0).all());

    const int n = 200000;
    RVector acc = RVector::Zero(4);
    for (int i = 0; i < n; ++i)
        acc += sample_diagonal_noise(q, rng).cwiseAbs2();
    acc /= n;
    for (int i = 0; i < 4; ++i)
        CHECK(acc(i) == doctest::Approx(q(i, i).real()).epsilon(0.02));
}

TEST_CASE("mid-rise quantizer")
{
    const MidriseQuantizer q3(3);
    const double d = q3.step(1.0);
    CHECK(d == doctest::Approx(2.0 * 3.0 / 8.0));
    CHECK(q3.quantize(0.0, 1.0) == doctest::Approx(d / 2.0));
    CHECK(q3.quantize(100.0, 1.0) == doctest::Approx(3.5 * d));
    CHECK(q3.quantize(-100.0, 1.0) == doctest::Approx(-3.5 * d));
    CHECK_THROWS_AS((void)q3.quantize(0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(MidriseQuantizer(0), std::invalid_argument);

    // idempotent on its own levels
    for (int i = -4; i < 4; ++i)
    {
        const double level = (i + 0.5) * d;
        CHECK(q3.quantize(level, 1.0) == level);
    }

    // cell bound at 16 bits for in-range inputs
    const MidriseQuantizer q16(16);
    RngStream rng(1, 0, StreamTag::Quantization);
    const double d16 = q16.step(1.0);
    for (int i = 0; i < 1000; ++i)
    {
        const double x = 2.9 * (2.0 * rng.uniform() - 1.0);
        CHECK(std::abs(q16.quantize(x, 1.0) - x) <= d16 / 2.0 + 1e-15);
    }

    // complex input: components independently
    const CVector z = (CVector(2) << cdouble(0.0, 0.0), cdouble(0.2, -0.2)).finished();
    const CVector out = midrise_quantize(z, 3, RVector::Ones(2));
    CHECK(out(0) == cdouble(d / 2.0, d / 2.0));
    CHECK(out(1) == cdouble(d / 2.0, -d / 2.0));
}

TEST_CASE("mid-rise MSE: closed form, Monte Carlo and AQNM")
{
    RngStream rng(2, 0, StreamTag::Quantization);
    const MidriseQuantizer q(3, 3.0);
    const double mc = sample_mse(q, 400000, rng);
    CHECK(mc == doctest::Approx(midrise_gaussian_mse(3, 3.0)).epsilon(0.02));

    // with the calibrated loading factor the distortion tracks beta(3)
    const double load = mse_optimal_loading(3);
    const double calibrated = sample_mse(MidriseQuantizer(3, load), 400000, rng);
    CHECK(std::abs(calibrated - distortion_factor(3)) <= 0.15 * distortion_factor(3));
    CHECK(midrise_gaussian_mse(3, load) <= midrise_gaussian_mse(3, 3.0));
}
