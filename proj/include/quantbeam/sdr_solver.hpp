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

// Globally optimal beamforming for a point target with uniform DACs.
//
// With A_t = alpha_t I and G = eta b a^H the radar SQNR is increasing in
// a^H R_x a once the power budget is active, so the design reduces to
//
//   maximize   a^H R_x a
//   subject to (1 + 1/Gamma_k) alpha_k alpha_t^2 h_k^H R_k h_k
//                >= alpha_t^2 h_k^H R_x h_k
//                   + alpha_t (1 - alpha_t) h_k^H diag(R_x) h_k + sigma_k^2
//              R_x - sum_k R_k >= 0,  R_k >= 0,  alpha_t Tr(R_x) <= P
//
// whose optimum admits rank-one R_k.

#include "quantbeam/conic.hpp"
#include "quantbeam/metrics.hpp"
#include "quantbeam/system.hpp"

#include <memory>
#include <vector>

namespace quantbeam
{

struct SdrSettings
{
    conic::ConicSettings conic;
    /// Powers are divided by this inside the conic program; 0 selects sigma_k^2.
    double reference_power = 0.0;
    /// Solve the SQINR margin program before the main one.
    bool feasibility_precheck = false;
    std::shared_ptr<const conic::ConicSolver> solver; ///< null = conic::barrier_solver()
};

/// Shape of the conic program handed to the engine. The relaxation is solved
/// through its Lagrange dual, whose variables are (lambda_1..lambda_K, mu);
/// the covariances are read from the dual variables of the K + 1 PSD blocks
/// (block k < K belongs to user k, block K to the radar residual).
struct SdrLayout
{
    int n_tx = 0;
    int n_users = 0;
    double reference_power = 1.0;
    bool margin = false; ///< margin program: one extra zero-cone row first

    [[nodiscard]] Eigen::Index lambda_index(int k) const { return k; }
    [[nodiscard]] Eigen::Index mu_index() const { return n_users; }
    [[nodiscard]] Eigen::Index n_vars() const { return n_users + 1; }
    [[nodiscard]] Eigen::Index block_rows() const { return conic::svec_size(2 * n_tx); }
    [[nodiscard]] Eigen::Index block_offset(int b) const
    {
        return (margin ? 1 : 0) + (n_users + 1) + b * block_rows();
    }
};

/// Throws std::invalid_argument unless the target is a point and all DACs
/// share one resolution.
void require_sdr_scenario(const Scenario &scenario);

/// The relaxation above in conic form (powers divided by reference_power).
conic::ConicProblem build_sdr(const Scenario &scenario, double reference_power, SdrLayout *layout = nullptr);

struct SdrRelaxation
{
    CMatrix R_x;
    std::vector<CMatrix> R_k;
    double objective = 0.0; ///< a^H R_x a, watts
    conic::ConicSolution conic;
};

/// Solves the relaxation; throws InfeasibleError or SolverFailure.
SdrRelaxation solve_sdr_relaxation(const Scenario &scenario, const SdrSettings &settings = {});

struct RankOneSolution
{
    CMatrix R_x;
    std::vector<CMatrix> R_k;
};

/// R_k <- R_k h_k h_k^H R_k / (h_k^H R_k h_k), R_x unchanged.
/// Throws NumericalError when some h_k^H R_k h_k is not positive.
RankOneSolution rank_one_reduce(const CMatrix &R_x, const std::vector<CMatrix> &R_k,
                                const std::vector<CVector> &h);

/// w_k = R_k h_k / sqrt(h_k^H R_k h_k), rotated so that h_k^H A_t w_k >= 0,
/// and W_r any square root of R_x - sum_k w_k w_k^H. Throws NumericalError
/// when that residual has an eigenvalue below -1e-6 (relative to Tr R_x).
BeamformingSolution extract_beamformers(const CMatrix &R_x, const std::vector<CMatrix> &R_k,
                                        const std::vector<CVector> &h, const RVector &alpha_t);

/// Full pipeline: relaxation, rank-one reduction, extraction, evaluation.
BeamformingSolution solve_sdr(const Scenario &scenario, const SdrSettings &settings = {});

/// Rotate every column of W_c so that h_k^H A_t w_k is real and nonnegative.
void phase_align(CMatrix &W_c, const ChannelSet &channels, const RVector &alpha_t);

} // namespace quantbeam
