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

// Majorization-minimization for the general case (mixed DACs, any target).
//
// With V = [W_c, W_r], X = V^H A_t G^H A_r and Z = Q(V), the radar SQNR is
// f(V) = Tr(X Z^-1 X^H). Joint convexity of Tr(X Z^-1 X^H) gives the
// minorizer, tight at V_m,
//
//   g(V; V_m) = 2 Re Tr(Z_m^-1 X_m^H X) - Tr(C_m Z(V)),
//   C_m = Z_m^-1 X_m^H X_m Z_m^-1,
//
// and because Z depends on V V^H only through diagonals this equals
// 2 Re Tr(V^H D_m) - Tr(V^H M_m V) - const_m (see docs/mm_quadratic_form.md).
// Each step maximizes g under the SOC form of the SQINR constraints and the
// power budget.

#include "quantbeam/conic.hpp"
#include "quantbeam/metrics.hpp"
#include "quantbeam/system.hpp"

#include <iosfwd>
#include <memory>
#include <vector>

namespace quantbeam
{

struct MMState
{
    CMatrix V; ///< N_T x (K + N_T)
    CMatrix X; ///< V^H A_t G^H A_r
    CMatrix Z; ///< Q(V)
    double f = 0.0;
    int iteration = 0;
    std::vector<double> history;
};

/// f(V); throws NumericalError when Z(V) is not positive definite.
double objective_f(const CMatrix &V, const Scenario &scenario);

/// State at V (X, Z and f filled in, iteration 0).
MMState make_state(const CMatrix &V, const Scenario &scenario);

/// g(V; V_m) evaluated from its definition.
double surrogate_g(const CMatrix &V, const MMState &state, const Scenario &scenario);

/// g(V; V_m) = 2 Re Tr(V^H D) - Tr(V^H M V) - constant.
struct SurrogateQuadratic
{
    CMatrix D; ///< N_T x (K + N_T)
    CMatrix M; ///< N_T x N_T, Hermitian PSD
    double constant = 0.0;

    [[nodiscard]] double evaluate(const CMatrix &V) const;
};

SurrogateQuadratic surrogate_terms(const MMState &state, const Scenario &scenario);

/// Index of Re/Im of V(n, j) and of the epigraph variable in the subproblem.
struct MMLayout
{
    int n_tx = 0;
    int n_cols = 0;

    [[nodiscard]] Eigen::Index re(int n, int j) const { return 2 * (static_cast<Eigen::Index>(j) * n_tx + n); }
    [[nodiscard]] Eigen::Index im(int n, int j) const { return re(n, j) + 1; }
    [[nodiscard]] Eigen::Index epigraph() const { return 2 * static_cast<Eigen::Index>(n_tx) * n_cols; }
    [[nodiscard]] Eigen::Index n_vars() const { return epigraph() + 1; }

    [[nodiscard]] RVector pack(const CMatrix &V) const;
    [[nodiscard]] CMatrix unpack(const RVector &x) const;
};

/// Maximize g(V; V_m) subject to
///   sqrt(alpha_k (1 + 1/Gamma_k)) Re(h_k^H A_t V e_k)
///       >= || (V^H A_t h_k, [|h_ki| sqrt(alpha_ti (1 - alpha_ti)) v_i]_i, sigma_k) ||
///   || (sqrt(alpha_tn) v_n)_n || <= sqrt(P)
/// with Tr(V^H M V) <= t as the rotated cone || (2 F V, t - 1) || <= t + 1.
/// With `feasibility` set the objective is dropped (SQINR feasibility program).
/// Throws NumericalError when M has an eigenvalue below -1e-8 |M|.
conic::ConicProblem build_subproblem(const MMState &state, const Scenario &scenario, bool feasibility = false);

struct MMSettings
{
    double eps = 1e-4; ///< stop on |f_{m+1} - f_m| / max(1, |f_m|) < eps
    int max_iters = 50;
    double init_margin_db = 3.0;
    conic::ConicSettings conic;
    /// Powers are divided by this inside the subproblems; 0 selects sigma_k^2.
    double reference_power = 0.0;
    std::shared_ptr<const conic::ConicSolver> solver;
};

/// Starting point: MRT directions A_t h_k / |A_t h_k| with powers meeting
/// every SQINR threshold with the requested margin (bisected down towards
/// 0 dB if the budget is exceeded) and W_r = 0; falls back to the SQINR
/// feasibility program. Throws InfeasibleError.
CMatrix initialize(const Scenario &scenario, const MMSettings &settings = {});

/// One row per outer iteration: iter, f, max constraint violation, conic
/// iterations of the subproblem.
struct MMTraceRow
{
    int iteration;
    double f;
    double max_violation;
    int subproblem_iterations;
};

void write_trace_csv(std::ostream &os, const std::vector<MMTraceRow> &rows);

/// Largest violation of the SQINR (relative to Gamma_k) and power (relative
/// to P) constraints at V; <= 0 means feasible.
double max_constraint_violation(const CMatrix &V, const Scenario &scenario);

struct MMResult
{
    BeamformingSolution solution;
    std::vector<MMTraceRow> trace;
};

/// Runs the MM iteration from `start` (or from initialize() when empty).
/// The objective history is nondecreasing: a step that would lower f ends
/// the run at the previous iterate.
MMResult run_mm(const Scenario &scenario, const MMSettings &settings = {}, const CMatrix &start = CMatrix());

/// Convenience wrapper returning only the solution.
BeamformingSolution solve_mm(const Scenario &scenario, const MMSettings &settings = {});

} // namespace quantbeam
