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

// Closed-form performance metrics of the quantized ISAC link.

#include "quantbeam/channel.hpp"
#include "quantbeam/linalg.hpp"
#include "quantbeam/quantization.hpp"
#include "quantbeam/system.hpp"

#include <string>
#include <vector>

namespace quantbeam
{

struct SolverInfo
{
    std::string solver;     ///< "sdr", "mm", ...
    std::string status;     ///< "optimal", "converged", "max_iters", ...
    int iterations = 0;     ///< outer iterations (MM) or conic iterations (SDR)
    int conic_iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double wall_time = 0.0; ///< seconds
    std::vector<double> objective_history;
};

struct BeamformingSolution
{
    CMatrix W_c; ///< N_T x K
    CMatrix W_r; ///< N_T x N_T
    CMatrix R_x; ///< W_r W_r^H + W_c W_c^H

    double objective_value = 0.0; ///< radar SQNR under the design model
    RVector sqinr_per_user;       ///< under the design model
    double radar_sqnr = 0.0;      ///< trace form
    double radar_sqnr_lambda_max = 0.0;
    SolverInfo solver_info;

    /// V = [W_c, W_r].
    [[nodiscard]] CMatrix V() const;
};

CMatrix covariance_rx(const CMatrix &W_c, const CMatrix &W_r);

/// Sum_n alpha_{t,n} [R_x]_nn.
double transmit_power(const RVector &alpha_t, const CMatrix &R_x);

/// Tr(A_t R_x A_t^H + A_t (I - A_t) diag(R_x)); equal to transmit_power.
double transmit_power_trace_form(const RVector &alpha_t, const CMatrix &R_x);

/// SQINR of user k: alpha_k |h^H A_t w_k|^2 over
/// h^H A_t (R_x - alpha_k w_k w_k^H) A_t^H h + h^H R_qt h + sigma_k^2.
double sqinr(int k, const CMatrix &W_c, const CMatrix &W_r, const CVector &h,
             const QuantizationProfile &profile, double sigma_k2);

/// The same quantity written with the explicit user-ADC noise term.
double sqinr_first_form(int k, const CMatrix &W_c, const CMatrix &W_r, const CVector &h,
                        const QuantizationProfile &profile, double sigma_k2);

/// SQINR of every user.
RVector sqinr_all(const CMatrix &W_c, const CMatrix &W_r, const ChannelSet &channels,
                  const QuantizationProfile &profile, double sigma_k2);

struct RadarCovariances
{
    CMatrix R_qt;  ///< DAC noise covariance
    CMatrix R_ybs; ///< unquantized BS receive covariance
    CMatrix R_qr;  ///< BS ADC noise covariance
    CMatrix Q;     ///< quantization-plus-noise covariance after the ADCs
    CMatrix S;     ///< A_r G A_t R_x A_t^H G^H A_r^H
};

RadarCovariances radar_covariances(const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                                   double sigma_r2);

/// Tr(S Q^-1). Throws NumericalError when Q is singular, std::invalid_argument
/// for sigma_r2 <= 0.
double radar_sqnr_max(const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                      double sigma_r2);

/// Largest generalized eigenvalue of (S, Q): the best single-beam SQNR.
double radar_sqnr_lambda_max(const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                             double sigma_r2);

/// Unit-norm principal generalized eigenvector of (S, Q).
CVector receive_beamformer(const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                           double sigma_r2);

/// u^H S u / u^H Q u for a given receive beamformer.
double radar_sqnr(const CVector &u, const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                  double sigma_r2);

/// Parameters of the point-target, uniform-DAC closed forms.
struct PointModel
{
    double alpha_t;  ///< common DAC gain
    cdouble eta;     ///< reflection coefficient
    double theta;    ///< radians
    RVector alpha_r; ///< BS ADC gains
    double sigma_r2;
    double power_w;  ///< budget P; the formulas need alpha_t Tr(R_x) = P
};

/// Q^-1 through the diagonal-plus-rank-one structure of Q.
/// Throws std::invalid_argument unless |alpha_t Tr(R_x) - P| <= 1e-6 P.
CMatrix closed_form_q_inverse(const CMatrix &R_x, const PointModel &model);

/// |eta|^2 zeta / (1/c + |eta|^2 eps) with zeta = alpha_t^2 a^H R_x a,
/// eps = (1 - alpha_t) P and c = sum_i alpha_{r,i} / B_ii.
/// Same precondition as closed_form_q_inverse.
double point_objective_closed_form(const CMatrix &R_x, const PointModel &model);

/// Converter and RF power consumption.
struct PowerModel
{
    double p_lo = 0.0;  ///< local oscillator, watts
    double p_rf = 0.0;  ///< one RF chain, watts
    double c_dac = 0.0; ///< DAC power = c_dac 2^b, watts
    double c_adc = 0.0; ///< ADC power = c_adc 2^b, watts
    double kappa = 1.0; ///< amplifier efficiency

    [[nodiscard]] double dac_power(int bits) const;
    [[nodiscard]] double adc_power(int bits) const;

    /// Throws std::invalid_argument unless every term is positive and
    /// kappa lies in (0, 1].
    void validate() const;
};

/// P_LO + sum over transmit chains (P_RF + 2 P_DAC) + sum over receive chains
/// (P_RF + 2 P_ADC) + P / kappa. Requires finite resolutions.
double bs_power(const SystemConfig &config, const PowerModel &pm);

/// Sum over users of P_LO + P_RF + 2 P_ADC.
double users_power(const SystemConfig &config, const PowerModel &pm);

/// (sum_k log2(1 + gamma_k) + log2(1 + gamma_r)) / (P_BS + sum P_UE).
double energy_efficiency(const RVector &gammas, double gamma_r, const SystemConfig &config,
                         const PowerModel &pm);

/// Fill R_x and every metric of `sol` from its beamformers.
void evaluate_solution(BeamformingSolution &sol, const Scenario &scenario);

} // namespace quantbeam
