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

#include "quantbeam/sdr_solver.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <limits>

namespace quantbeam
{

namespace
{

using conic::Triplet;

/// The relaxation is passed to the conic engine through its Lagrange dual:
///
///   minimize   mu P - sum_k lambda_k sigma_k^2
///   subject to F_k = mu alpha_t I + sum_j lambda_j D_j
///                    - lambda_k c_k h_k h_k^H - a a^H >= 0     (k = 1..K)
///              F_r = mu alpha_t I + sum_j lambda_j D_j - a a^H >= 0
///              lambda, mu >= 0
///
/// with D_j = alpha_t^2 h_j h_j^H + alpha_t (1 - alpha_t) diag(|h_j|^2) and
/// c_k = (1 + 1/Gamma_k) alpha_k alpha_t^2. The conic dual variable of F_k is
/// R_k / 2 (embedded) and that of F_r is (R_x - sum_k R_k) / 2, so the
/// relaxation's optimum is read off the dual solution. Only K + 1 scalars
/// enter the linear algebra.
///
/// With `margin` set the a a^H terms are dropped and sum_k lambda_k = 1 is
/// added; this is the dual of "maximize the common SQINR slack".
struct Builder
{
    const Scenario &sc;
    double p_ref;
    bool margin;
    int n, k_users;
    SdrLayout layout;

    Builder(const Scenario &s, double pr, bool with_margin)
        : sc(s), p_ref(pr), margin(with_margin), n(s.config.n_tx), k_users(s.config.n_users)
    {
        layout.n_tx = n;
        layout.n_users = k_users;
        layout.reference_power = p_ref;
        layout.margin = margin;
    }

    Eigen::Index n_vars() const { return layout.n_vars(); }
    Eigen::Index mu_index() const { return layout.mu_index(); }
    Eigen::Index psd_rows() const { return layout.block_rows(); }
    Eigen::Index zero_rows() const { return margin ? 1 : 0; }
    Eigen::Index block_offset(int b) const { return layout.block_offset(b); }

    conic::ConicProblem build() const
    {
        const double alpha_t = *sc.profile.uniform_alpha_t();
        const Eigen::Index nv = n_vars();
        const Eigen::Index m = zero_rows() + (k_users + 1) + (k_users + 1) * psd_rows();

        conic::ConicProblem p;
        p.c = RVector::Zero(nv);
        p.b = RVector::Zero(m);
        std::vector<Triplet> trip;

        for (int k = 0; k < k_users; ++k)
            p.c(k) = -sc.config.sigma_k2 / p_ref;
        p.c(mu_index()) = sc.config.power_w / p_ref;

        Eigen::Index row = 0;
        if (margin)
        {
            for (int k = 0; k < k_users; ++k)
                trip.emplace_back(row, k, 1.0);
            p.b(row++) = 1.0;
        }
        for (Eigen::Index j = 0; j < nv; ++j)
            trip.emplace_back(row++, j, -1.0);

        // svec(embed(.)) of every coefficient matrix
        std::vector<RVector> d_vec, hh_vec;
        for (int k = 0; k < k_users; ++k)
        {
            const CVector h = sc.channels.user(k);
            CMatrix d = alpha_t * alpha_t * h * h.adjoint();
            d.diagonal() += alpha_t * (1.0 - alpha_t) * h.cwiseAbs2().cast<cdouble>();
            d_vec.push_back(conic::svec(conic::hermitian_embed(d)));
            hh_vec.push_back(conic::svec(conic::hermitian_embed(h * h.adjoint())));
        }
        const RVector eye_vec = conic::svec(conic::hermitian_embed(alpha_t * CMatrix::Identity(n, n)));
        RVector aa_vec = RVector::Zero(psd_rows());
        if (!margin)
        {
            const auto *pt = std::get_if<PointTarget>(&sc.channels.target);
            const CVector a = steering_tx(pt->theta, n);
            aa_vec = conic::svec(conic::hermitian_embed(a * a.adjoint()));
        }

        auto add_col = [&](Eigen::Index r0, Eigen::Index col, const RVector &v, double scale) {
            for (Eigen::Index i = 0; i < v.size(); ++i)
                if (v(i) != 0.0)
                    trip.emplace_back(r0 + i, col, -scale * v(i));
        };
        for (int b = 0; b <= k_users; ++b)
        {
            const Eigen::Index r0 = block_offset(b);
            add_col(r0, mu_index(), eye_vec, 1.0);
            for (int j = 0; j < k_users; ++j)
                add_col(r0, j, d_vec[static_cast<std::size_t>(j)], 1.0);
            if (b < k_users)
            {
                const double ck = (1.0 + 1.0 / sc.config.gamma(b)) * sc.profile.alpha_user(b) * alpha_t * alpha_t;
                add_col(r0, b, hh_vec[static_cast<std::size_t>(b)], -ck);
            }
            p.b.segment(r0, psd_rows()) = -aa_vec;
        }

        p.A.resize(m, nv);
        p.A.setFromTriplets(trip.begin(), trip.end());
        p.A.makeCompressed();
        p.cones.zero = static_cast<int>(zero_rows());
        p.cones.nonneg = k_users + 1;
        p.cones.psd.assign(static_cast<std::size_t>(k_users + 1), 2 * n);
        return p;
    }

    /// Covariances (watts) from the conic dual variables.
    void covariances(const RVector &y, CMatrix &r_x, std::vector<CMatrix> &r_k) const
    {
        auto block = [&](int b) {
            const RMatrix yb = conic::smat(y.segment(block_offset(b), psd_rows()), 2 * n);
            return CMatrix(2.0 * p_ref * conic::hermitian_extract(yb));
        };
        r_k.clear();
        r_x = block(k_users);
        for (int k = 0; k < k_users; ++k)
        {
            r_k.push_back(block(k));
            r_x += r_k.back();
        }
    }
};

double reference_power(const Scenario &sc, const SdrSettings &st)
{
    return st.reference_power > 0.0 ? st.reference_power : sc.config.sigma_k2;
}

std::shared_ptr<const conic::ConicSolver> pick_solver(const SdrSettings &st)
{
    return st.solver ? st.solver : conic::barrier_solver();
}

/// Normalized slack of every SQINR constraint at (R_x, R_k).
std::vector<double> sqinr_slacks(const Scenario &sc, const CMatrix &r_x, const std::vector<CMatrix> &r_k)
{
    const double alpha_t = *sc.profile.uniform_alpha_t();
    std::vector<double> out;
    for (int k = 0; k < sc.config.n_users; ++k)
    {
        const CVector h = sc.channels.user(k);
        const double useful = (h.adjoint() * r_k[static_cast<std::size_t>(k)] * h).value().real();
        const double total = (h.adjoint() * r_x * h).value().real();
        const double dq = h.cwiseAbs2().dot(real_diagonal(r_x));
        const double lhs = (1.0 + 1.0 / sc.config.gamma(k)) * sc.profile.alpha_user(k) * alpha_t * alpha_t * useful;
        const double rhs = alpha_t * alpha_t * total + alpha_t * (1.0 - alpha_t) * dq + sc.config.sigma_k2;
        out.push_back((lhs - rhs) / sc.config.sigma_k2);
    }
    return out;
}

/// Runs the margin program and throws InfeasibleError when the best common
/// slack is negative; returns normally otherwise.
void diagnose_feasibility(const Scenario &sc, const SdrSettings &st)
{
    if (sc.config.n_users == 0)
        return;
    const Builder b(sc, reference_power(sc, st), true);
    const auto sol = pick_solver(st)->solve(b.build(), st.conic);
    std::vector<UserDiagnostic> diag;
    auto fill = [&](const std::vector<double> &slack) {
        for (int k = 0; k < sc.config.n_users; ++k)
            diag.push_back({k, sc.config.gamma(k), sqinr_ceiling(sc.profile.alpha_user(k)),
                            slack.empty() ? std::numeric_limits<double>::quiet_NaN()
                                          : slack[static_cast<std::size_t>(k)]});
    };
    if (sol.status == conic::ConicStatus::Unbounded)
    {
        fill({});
        throw InfeasibleError("SQINR margin program is infeasible", diag);
    }
    if (!sol.optimal())
        throw SolverFailure("SQINR margin program: " + conic::to_string(sol.status));
    CMatrix r_x;
    std::vector<CMatrix> r_k;
    b.covariances(sol.y, r_x, r_k);
    // optimal common slack, in units of sigma_k^2
    const double t = sol.objective * b.p_ref / sc.config.sigma_k2;
    if (t < -1e-6)
    {
        fill(sqinr_slacks(sc, r_x, r_k));
        throw InfeasibleError("SQINR thresholds cannot be met within the power budget", diag);
    }
}

} // namespace

void require_sdr_scenario(const Scenario &scenario)
{
    require(is_point(scenario.channels.target), "sdr: only point targets are supported; use the MM solver");
    require(scenario.profile.uniform_alpha_t().has_value(),
            "sdr: DAC resolutions differ across chains; use the MM solver");
}

conic::ConicProblem build_sdr(const Scenario &scenario, double reference_power, SdrLayout *layout)
{
    scenario.validate();
    require_sdr_scenario(scenario);
    require(reference_power > 0.0, "sdr: reference power must be positive");
    const Builder b(scenario, reference_power, false);
    if (layout)
        *layout = b.layout;
    return b.build();
}

SdrRelaxation solve_sdr_relaxation(const Scenario &scenario, const SdrSettings &settings)
{
    scenario.validate();
    require_sdr_scenario(scenario);
    check_sqinr_ceilings(scenario);
    if (settings.feasibility_precheck)
        diagnose_feasibility(scenario, settings);

    const Builder b(scenario, reference_power(scenario, settings), false);
    const conic::ConicProblem prob = b.build();
    SdrRelaxation out;
    out.conic = pick_solver(settings)->solve(prob, settings.conic);
    spdlog::debug("sdr: {} after {} iterations ({:.3f} s)", conic::to_string(out.conic.status),
                  out.conic.iterations, out.conic.solve_time);
    // an unbounded dual certifies an infeasible relaxation
    if (out.conic.status == conic::ConicStatus::Unbounded)
    {
        diagnose_feasibility(scenario, settings);
        throw InfeasibleError("SDR relaxation is infeasible", {});
    }
    if (!out.conic.optimal())
        throw SolverFailure("sdr: conic solver stopped with status " + conic::to_string(out.conic.status));
    b.covariances(out.conic.y, out.R_x, out.R_k);
    const auto *pt = std::get_if<PointTarget>(&scenario.channels.target);
    const CVector a = steering_tx(pt->theta, scenario.config.n_tx);
    out.objective = (a.adjoint() * out.R_x * a).value().real();
    return out;
}

RankOneSolution rank_one_reduce(const CMatrix &R_x, const std::vector<CMatrix> &R_k, const std::vector<CVector> &h)
{
    require(R_k.size() == h.size(), "rank_one_reduce: one channel per user covariance");
    RankOneSolution out{R_x, {}};
    for (std::size_t k = 0; k < R_k.size(); ++k)
    {
        const CVector rh = R_k[k] * h[k];
        const double p = h[k].dot(rh).real();
        if (!(p > 0.0))
            throw NumericalError("rank_one_reduce: user " + std::to_string(k) + " receives no useful power");
        out.R_k.push_back(rh * rh.adjoint() / p);
    }
    return out;
}

void phase_align(CMatrix &W_c, const ChannelSet &channels, const RVector &alpha_t)
{
    for (int k = 0; k < W_c.cols(); ++k)
    {
        const CVector ath = alpha_t.cast<cdouble>().cwiseProduct(channels.user(k));
        const cdouble g = ath.dot(W_c.col(k)); // h^H A_t w_k
        if (std::abs(g) > 0.0)
            W_c.col(k) *= std::conj(g) / std::abs(g);
    }
}

BeamformingSolution extract_beamformers(const CMatrix &R_x, const std::vector<CMatrix> &R_k,
                                        const std::vector<CVector> &h, const RVector &alpha_t)
{
    require(R_k.size() == h.size(), "extract_beamformers: one channel per user covariance");
    const auto n = R_x.rows();
    BeamformingSolution sol;
    sol.W_c = CMatrix::Zero(n, static_cast<Eigen::Index>(R_k.size()));
    for (std::size_t k = 0; k < R_k.size(); ++k)
    {
        const CVector rh = R_k[k] * h[k];
        const double p = h[k].dot(rh).real();
        if (!(p > 0.0))
            throw NumericalError("extract_beamformers: user " + std::to_string(k) + " receives no useful power");
        CVector w = rh / std::sqrt(p);
        const cdouble g = (alpha_t.cast<cdouble>().cwiseProduct(h[k])).dot(w);
        if (std::abs(g) > 0.0)
            w *= std::conj(g) / std::abs(g);
        sol.W_c.col(static_cast<Eigen::Index>(k)) = w;
    }
    const CMatrix residual = hermitian_part(R_x - sol.W_c * sol.W_c.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(residual);
    const double scale = std::max(R_x.trace().real(), std::numeric_limits<double>::min());
    if (es.eigenvalues().size() > 0 && es.eigenvalues().minCoeff() < -1e-6 * scale)
        throw NumericalError("extract_beamformers: R_x - sum w_k w_k^H is indefinite");
    RVector lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        lam(i) = lam(i) < 1e-10 * scale ? 0.0 : std::sqrt(lam(i));
    sol.W_r = es.eigenvectors() * lam.cast<cdouble>().asDiagonal();
    sol.R_x = covariance_rx(sol.W_c, sol.W_r);
    return sol;
}

BeamformingSolution solve_sdr(const Scenario &scenario, const SdrSettings &settings)
{
    const auto start = std::chrono::steady_clock::now();
    const SdrRelaxation rel = solve_sdr_relaxation(scenario, settings);
    std::vector<CVector> h;
    for (int k = 0; k < scenario.config.n_users; ++k)
        h.push_back(scenario.channels.user(k));
    const RankOneSolution r1 = rank_one_reduce(rel.R_x, rel.R_k, h);
    BeamformingSolution sol = extract_beamformers(r1.R_x, r1.R_k, h, scenario.profile.alpha_t);
    evaluate_solution(sol, scenario);
    auto &info = sol.solver_info;
    info.solver = "sdr";
    info.status = "optimal";
    info.iterations = 1;
    info.conic_iterations = rel.conic.iterations;
    info.primal_residual = rel.conic.primal_residual;
    info.dual_residual = rel.conic.dual_residual;
    info.objective_history = {sol.objective_value};
    info.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

} // namespace quantbeam
