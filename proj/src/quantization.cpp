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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace quantbeam
{

BitDepth BitDepth::finite(int bits)
{
    if (bits < 1)
        throw std::invalid_argument("bit depth must be >= 1, got " + std::to_string(bits));
    return BitDepth(Kind::Finite, bits);
}

int BitDepth::bits() const
{
    if (is_infinite())
        throw std::logic_error("infinite bit depth has no bit count");
    return bits_;
}

std::string BitDepth::to_string() const
{
    return is_infinite() ? std::string("inf") : std::to_string(bits_);
}

BitAllocation BitAllocation::uniform(int n_tx, int n_rx, int n_users, BitDepth b)
{
    require(n_tx >= 1 && n_rx >= 1 && n_users >= 0, "BitAllocation::uniform: bad dimensions");
    return {std::vector<BitDepth>(n_tx, b), std::vector<BitDepth>(n_rx, b),
            std::vector<BitDepth>(n_users, b)};
}

BitAllocation BitAllocation::ideal(int n_tx, int n_rx, int n_users)
{
    return uniform(n_tx, n_rx, n_users, BitDepth::infinite());
}

bool BitAllocation::uniform_dac() const
{
    return std::adjacent_find(dac_bits.begin(), dac_bits.end(), std::not_equal_to<>()) ==
           dac_bits.end();
}

void BitAllocation::validate() const
{
    require(!dac_bits.empty(), "BitAllocation: no DACs");
    require(!adc_bits_bs.empty(), "BitAllocation: no BS ADCs");
}

CMatrix QuantizationProfile::gain_tx() const
{
    return alpha_t.cast<cdouble>().asDiagonal();
}

CMatrix QuantizationProfile::gain_rx() const
{
    return alpha_r.cast<cdouble>().asDiagonal();
}

std::optional<double> QuantizationProfile::uniform_alpha_t() const
{
    if (alpha_t.size() == 0)
        return std::nullopt;
    if ((alpha_t.array() == alpha_t(0)).all())
        return alpha_t(0);
    return std::nullopt;
}

QuantizationProfile QuantizationProfile::ideal(int n_tx, int n_rx, int n_users)
{
    return {RVector::Ones(n_tx), RVector::Ones(n_rx), RVector::Ones(n_users)};
}

double distortion_factor(int b)
{
    // Lloyd-Max optimal quantizer, unit-variance Gaussian input
    static constexpr std::array<double, 5> kLloydMax = {0.3634, 0.1175, 0.03454, 0.009497, 0.002499};
    if (b <= 0)
        throw std::invalid_argument("distortion_factor: bit depth must be >= 1, got " +
                                    std::to_string(b));
    if (b <= 5)
        return kLloydMax[static_cast<std::size_t>(b - 1)];
    return std::sqrt(3.0) * std::numbers::pi / 2.0 * std::exp2(-2.0 * b);
}

double distortion_factor(BitDepth b)
{
    return b.is_infinite() ? 0.0 : distortion_factor(b.bits());
}

namespace
{

RVector gains(const std::vector<BitDepth> &bits)
{
    RVector a(static_cast<Eigen::Index>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i)
        a(static_cast<Eigen::Index>(i)) = bits[i].is_infinite() ? 1.0 : 1.0 - distortion_factor(bits[i]);
    return a;
}

CMatrix aqnm_cov(const RVector &alpha, const CMatrix &input_cov, const char *what)
{
    require(input_cov.rows() == input_cov.cols(), std::string(what) + ": covariance must be square");
    require(alpha.size() == input_cov.rows(), std::string(what) + ": dimension mismatch");
    CMatrix out = CMatrix::Zero(alpha.size(), alpha.size());
    for (Eigen::Index n = 0; n < alpha.size(); ++n)
        out(n, n) = std::max(0.0, alpha(n) * (1.0 - alpha(n)) * input_cov(n, n).real());
    return out;
}

} // namespace

QuantizationProfile build_profile(const BitAllocation &bits)
{
    bits.validate();
    return {gains(bits.dac_bits), gains(bits.adc_bits_bs), gains(bits.adc_bits_user)};
}

CMatrix dac_noise_cov(const RVector &alpha_t, const CMatrix &r_x)
{
    return aqnm_cov(alpha_t, r_x, "dac_noise_cov");
}

CMatrix bs_adc_noise_cov(const RVector &alpha_r, const CMatrix &r_ybs)
{
    return aqnm_cov(alpha_r, r_ybs, "bs_adc_noise_cov");
}

CVector sample_diagonal_noise(const CMatrix &cov, RngStream &rng)
{
    CVector q(cov.rows());
    for (Eigen::Index n = 0; n < cov.rows(); ++n)
        q(n) = rng.complex_normal(std::max(0.0, cov(n, n).real()));
    return q;
}

MidriseQuantizer::MidriseQuantizer(int bits, double loading)
    : bits_(bits), loading_(loading), half_levels_(0.0)
{
    require(bits >= 1, "MidriseQuantizer: bits must be >= 1");
    require(bits <= 52, "MidriseQuantizer: bits must be <= 52");
    require(loading > 0.0, "MidriseQuantizer: loading factor must be positive");
    half_levels_ = std::exp2(bits - 1);
}

double MidriseQuantizer::step(double rms) const
{
    return 2.0 * loading_ * rms / (2.0 * half_levels_);
}

double MidriseQuantizer::quantize(double x, double rms) const
{
    if (!(rms > 0.0))
        throw std::invalid_argument("MidriseQuantizer: scale must be positive");
    const double delta = step(rms);
    const double idx = std::clamp(std::floor(x / delta), -half_levels_, half_levels_ - 1.0);
    return (idx + 0.5) * delta;
}

CVector MidriseQuantizer::quantize(const CVector &z, const RVector &scale) const
{
    require(scale.size() == z.size(), "MidriseQuantizer: scale size mismatch");
    CVector out(z.size());
    for (Eigen::Index n = 0; n < z.size(); ++n)
        out(n) = {quantize(z(n).real(), scale(n)), quantize(z(n).imag(), scale(n))};
    return out;
}

CVector midrise_quantize(const CVector &z, int bits, const RVector &scale, double loading)
{
    return MidriseQuantizer(bits, loading).quantize(z, scale);
}

double midrise_gaussian_mse(int bits, double loading)
{
    const MidriseQuantizer q(bits, loading);
    const double delta = q.step(1.0);
    const double half = std::exp2(bits - 1);
    auto pdf = [](double x) { return std::isinf(x) ? 0.0 : std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
    auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    // x phi(x) -> 0 at +-inf
    auto xpdf = [&](double x) { return std::isinf(x) ? 0.0 : x * pdf(x); };

    double mse = 0.0;
    for (double i = -half; i <= half - 1.0; i += 1.0)
    {
        const double lo = (i == -half) ? -INFINITY : i * delta;
        const double hi = (i == half - 1.0) ? INFINITY : (i + 1.0) * delta;
        const double r = (i + 0.5) * delta;
        const double p0 = cdf(hi) - cdf(lo);
        const double p1 = pdf(lo) - pdf(hi);
        const double p2 = p0 + xpdf(lo) - xpdf(hi);
        mse += p2 - 2.0 * r * p1 + r * r * p0;
    }
    return mse;
}

double mse_optimal_loading(int bits)
{
    require(bits >= 1 && bits <= 20, "mse_optimal_loading: bits out of range");
    // golden-section search; the MSE is unimodal in the loading factor
    double a = 0.05, b = 8.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = midrise_gaussian_mse(bits, c), fd = midrise_gaussian_mse(bits, d);
    for (int it = 0; it < 200 && (b - a) > 1e-10; ++it)
    {
        if (fc < fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = midrise_gaussian_mse(bits, c);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = midrise_gaussian_mse(bits, d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace quantbeam
