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

// Additive quantization noise model (AQNM) and a mid-rise scalar quantizer.
//
// Under the AQNM a b-bit converter acting on a chain with input power p is
// replaced by the gain alpha = 1 - beta(b) plus uncorrelated circular Gaussian
// noise of variance alpha * (1 - alpha) * p.

#include "quantbeam/linalg.hpp"
#include "quantbeam/rng.hpp"

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace quantbeam
{

/// Resolution of one converter: a positive bit count or "infinite".
class BitDepth
{
public:
    enum class Kind
    {
        Finite,
        Infinite,
    };

    /// Throws std::invalid_argument unless bits >= 1.
    static BitDepth finite(int bits);
    static constexpr BitDepth infinite() { return BitDepth(Kind::Infinite, 0); }

    [[nodiscard]] bool is_infinite() const { return kind_ == Kind::Infinite; }
    [[nodiscard]] Kind kind() const { return kind_; }

    /// Bit count; throws std::logic_error for infinite resolution.
    [[nodiscard]] int bits() const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const BitDepth &, const BitDepth &) = default;

private:
    constexpr BitDepth(Kind k, int b) : kind_(k), bits_(b) {}

    Kind kind_;
    int bits_;
};

/// Per-chain converter resolutions of the whole link.
struct BitAllocation
{
    std::vector<BitDepth> dac_bits;      ///< one per transmit chain (N_T)
    std::vector<BitDepth> adc_bits_bs;   ///< one per BS receive chain (N_R)
    std::vector<BitDepth> adc_bits_user; ///< one per user (K)

    static BitAllocation uniform(int n_tx, int n_rx, int n_users, BitDepth b);
    static BitAllocation ideal(int n_tx, int n_rx, int n_users);

    /// True when every DAC has the same resolution (enables the SDR path).
    [[nodiscard]] bool uniform_dac() const;

    /// Throws std::invalid_argument on empty DAC/ADC lists.
    void validate() const;
};

/// AQNM gains alpha = 1 - beta for every converter.
struct QuantizationProfile
{
    RVector alpha_t;    ///< DAC gains (N_T)
    RVector alpha_r;    ///< BS ADC gains (N_R)
    RVector alpha_user; ///< user ADC gains (K)

    [[nodiscard]] CMatrix gain_tx() const; ///< A_t
    [[nodiscard]] CMatrix gain_rx() const; ///< A_r

    /// Common DAC gain when all DACs share one value.
    [[nodiscard]] std::optional<double> uniform_alpha_t() const;

    /// All gains equal to one: the unquantized model.
    static QuantizationProfile ideal(int n_tx, int n_rx, int n_users);
};

/// Normalized MSE of an optimal b-bit quantizer for a unit-variance Gaussian.
///
/// b <= 5 uses the Lloyd-Max values {0.3634, 0.1175, 0.03454, 0.009497,
/// 0.002499}; b > 5 uses (sqrt(3) pi / 2) 2^(-2b); infinite resolution gives 0.
double distortion_factor(BitDepth b);

/// Same, for a raw bit count. Throws std::invalid_argument for b <= 0.
double distortion_factor(int b);

QuantizationProfile build_profile(const BitAllocation &bits);

/// R_qt = A_t (I - A_t) diag(R_x).
CMatrix dac_noise_cov(const RVector &alpha_t, const CMatrix &r_x);

/// R_qr = A_r (I - A_r) diag(R_yBS).
CMatrix bs_adc_noise_cov(const RVector &alpha_r, const CMatrix &r_ybs);

/// Draw q ~ CN(0, R) for a diagonal covariance R.
CVector sample_diagonal_noise(const CMatrix &cov, RngStream &rng);

/// Default loading factor of the mid-rise quantizer: the grid spans +-L
/// standard deviations of each real component.
inline constexpr double kDefaultLoadingFactor = 3.0;

/// Uniform mid-rise quantizer with 2^b levels per real component.
class MidriseQuantizer
{
public:
    /// Throws std::invalid_argument for b < 1 or loading <= 0.
    explicit MidriseQuantizer(int bits, double loading = kDefaultLoadingFactor);

    [[nodiscard]] int bits() const { return bits_; }
    [[nodiscard]] double loading() const { return loading_; }

    /// Step size for a component with the given RMS: 2 L rms / 2^b.
    [[nodiscard]] double step(double rms) const;

    /// Quantize one real value; rms must be positive.
    [[nodiscard]] double quantize(double x, double rms) const;

    /// Quantize real and imaginary parts independently. scale(n) is the RMS
    /// of each real component of chain n; throws on a nonpositive entry.
    [[nodiscard]] CVector quantize(const CVector &z, const RVector &scale) const;

private:
    int bits_;
    double loading_;
    double half_levels_;
};

/// Free-function form of MidriseQuantizer::quantize.
CVector midrise_quantize(const CVector &z, int bits, const RVector &scale,
                         double loading = kDefaultLoadingFactor);

/// Mean squared error of the mid-rise quantizer on a unit-variance real
/// Gaussian input, evaluated in closed form cell by cell.
double midrise_gaussian_mse(int bits, double loading);

/// Loading factor minimizing midrise_gaussian_mse (calibration hook).
double mse_optimal_loading(int bits);

} // namespace quantbeam
