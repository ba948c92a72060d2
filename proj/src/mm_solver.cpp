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

#include "quantbeam/mm_solver.hpp"

#include "quantbeam/sdr_solver.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace quantbeam
{

namespace
{

using conic::Triplet;

double reference_power(const Scenario &sc, double requested)
{
    return requested > 0.0 ? requested : sc.config.sigma_k2;
}

// Same instance with every power divided by p; f is unchanged when V is
// divided by sqrt(p).
Scenario normalized(const Scenario &sc, double p)
{
    Scenario out = sc;
    out.config.power_w /= p;
    out.config.sigma_r2 /= p;
    out.config.sigma_k2 /= p;
    return out;
}

int n_cols(const Scenario &sc) { return sc.config.n_users + sc.config.n_tx; }

CMatrix compute_x(const CMatrix &V, const Scenario &sc)
{
    const CMatrix &G = sc.channels.G;
    const auto at = sc.profile.alpha_t.cast<cdouble>();
    const auto ar = sc.profile.alpha_r.cast<cdouble>();
    // V^H A_t G^H A_r
    return (V.adjoint() * at.asDiagonal() * G.adjoint()) * ar.asDiagonal();
}

CMatrix compute_z(const CMatrix &V, const Scenario &sc)
{
    return radar_covariances(sc.channels.G, sc.profile, V * V.adjoint(), sc.config.sigma_r2).Q;
}

Eigen::LLT<CMatrix> factor_z(const CMatrix &Z)
{
    Eigen::LLT<CMatrix> llt(hermitian_part(Z));
    if (llt.info() != Eigen::Success)
        throw NumericalError("radar noise covariance is not positive definite");
    return llt;
}

void check_dims(const CMatrix &V, const Scenario &sc)
{
    if (V.rows() != sc.config.n_tx || V.cols() != n_cols(sc))
        throw std::invalid_argument("V must be N_T x (K + N_T)");
}

CMatrix mrt_directions(const Scenario &sc)
{
    const int K = sc.config.n_users;
    CMatrix U(sc.config.n_tx, K);
    for (int k = 0; k < K; ++k)
    {
        const CVector g = sc.profile.alpha_t.cast<cdouble>().cwiseProduct(sc.channels.user(k));
        U.col(k) = g / g.norm();
    }
    return U;
}

// Interference plus noise a user sees from the radar column alone.
double radar_leakage(const CVector &h, const CVector &w_r, const RVector &at)
{
    const cdouble g = (at.cast<cdouble>().cwiseProduct(h)).dot(w_r);
    double dac = 0.0;
    for (Eigen::Index n = 0; n < h.size(); ++n)
        dac += std::norm(h(n)) * at(n) * (1.0 - at(n)) * std::norm(w_r(n));
    return std::norm(g) + dac;
}

// Minimal user powers along the MRT directions for thresholds scaled by
// `margin`, with a fixed radar column already transmitting. Empty on failure.
std::optional<CMatrix> mrt_with_margin(const Scenario &sc, const CMatrix &U, const CVector &w_r, double margin)
{
    const int K = sc.config.n_users;
    const int nt = sc.config.n_tx;
    const RVector &at = sc.profile.alpha_t;
    RMatrix T(K, K);
    RVector rhs(K);
    for (int k = 0; k < K; ++k)
    {
        const CVector h = sc.channels.user(k);
        const double gk = sc.config.gamma(k) * margin;
        const double ak = sc.profile.alpha_user(k);
        for (int j = 0; j < K; ++j)
        {
            double leak = std::norm((at.cast<cdouble>().cwiseProduct(h)).dot(U.col(j)));
            double dac = 0.0;
            for (int n = 0; n < nt; ++n)
                dac += std::norm(h(n)) * at(n) * (1.0 - at(n)) * std::norm(U(n, j));
            T(k, j) = -gk * (leak + dac);
            if (j == k)
                T(k, j) += ak * (1.0 + gk) * leak;
        }
        rhs(k) = gk * (sc.config.sigma_k2 + radar_leakage(h, w_r, at));
    }
    const RVector p = T.partialPivLu().solve(rhs);
    if (!p.allFinite() || (p.array() < 0.0).any())
        return std::nullopt;
    CMatrix V = CMatrix::Zero(nt, n_cols(sc));
    for (int k = 0; k < K; ++k)
        V.col(k) = std::sqrt(p(k)) * U.col(k);
    V.col(K) = w_r;
    if (max_constraint_violation(V, sc) > 0.0)
        return std::nullopt;
    return V;
}

// Objective coefficients are optional: without them only feasibility counts.
conic::ConicProblem build_program(const Scenario &sc, const SurrogateQuadratic *obj)
{
    const int nt = sc.config.n_tx;
    const int K = sc.config.n_users;
    const MMLayout L{nt, n_cols(sc)};
    const RVector &at = sc.profile.alpha_t;

    conic::ConicProblem prob;
    prob.c = RVector::Zero(L.n_vars());
    std::vector<Triplet> trips;
    std::vector<double> b;

    // Appends rows representing Re/Im of sum_n coef_n V(n, j) with a scale.
    auto linear_rows = [&](const CVector &coef, int j, double scale) {
        const auto re_row = static_cast<int>(b.size());
        for (int n = 0; n < nt; ++n)
        {
            const double cr = coef(n).real(), ci = coef(n).imag();
            if (cr != 0.0)
            {
                trips.emplace_back(re_row, L.re(n, j), -scale * cr);
                trips.emplace_back(re_row + 1, L.im(n, j), -scale * cr);
            }
            if (ci != 0.0)
            {
                trips.emplace_back(re_row, L.im(n, j), scale * ci);
                trips.emplace_back(re_row + 1, L.re(n, j), -scale * ci);
            }
        }
        b.push_back(0.0);
        b.push_back(0.0);
    };

    for (int k = 0; k < K; ++k)
    {
        const auto start = b.size();
        const CVector h = sc.channels.user(k);
        // coefficients of h^H A_t V e_j = sum_n conj(alpha_n h_n) V(n, j)
        const CVector g = at.cast<cdouble>().cwiseProduct(h).conjugate();
        const double lhs = std::sqrt(sc.profile.alpha_user(k) * (1.0 + 1.0 / sc.config.gamma(k)));
        const auto head = static_cast<int>(b.size());
        for (int n = 0; n < nt; ++n)
        {
            trips.emplace_back(head, L.re(n, k), -lhs * g(n).real());
            trips.emplace_back(head, L.im(n, k), lhs * g(n).imag());
        }
        b.push_back(0.0);
        for (int j = 0; j < L.n_cols; ++j)
            linear_rows(g, j, 1.0);
        for (int n = 0; n < nt; ++n)
        {
            const double w = std::abs(h(n)) * std::sqrt(at(n) * (1.0 - at(n)));
            if (w <= 0.0)
                continue;
            for (int j = 0; j < L.n_cols; ++j)
            {
                trips.emplace_back(static_cast<int>(b.size()), L.re(n, j), -w);
                b.push_back(0.0);
                trips.emplace_back(static_cast<int>(b.size()), L.im(n, j), -w);
                b.push_back(0.0);
            }
        }
        b.push_back(std::sqrt(sc.config.sigma_k2));
        prob.cones.soc.push_back(static_cast<int>(b.size() - start));
    }

    {
        const auto start = b.size();
        b.push_back(std::sqrt(sc.config.power_w));
        for (int j = 0; j < L.n_cols; ++j)
            for (int n = 0; n < nt; ++n)
            {
                const double w = std::sqrt(at(n));
                trips.emplace_back(static_cast<int>(b.size()), L.re(n, j), -w);
                b.push_back(0.0);
                trips.emplace_back(static_cast<int>(b.size()), L.im(n, j), -w);
                b.push_back(0.0);
            }
        prob.cones.soc.push_back(static_cast<int>(b.size() - start));
    }

    if (obj != nullptr)
    {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(obj->M));
        const RVector &lam = es.eigenvalues();
        const double top = std::max(lam.maxCoeff(), 0.0);
        if (lam.minCoeff() < -1e-8 * std::max(top, 1e-300))
            throw NumericalError("surrogate curvature matrix is not positive semidefinite");

        const auto start = b.size();
        const auto t = static_cast<int>(L.epigraph());
        trips.emplace_back(static_cast<int>(b.size()), t, -1.0);
        b.push_back(1.0);
        trips.emplace_back(static_cast<int>(b.size()), t, -1.0);
        b.push_back(-1.0);
        for (Eigen::Index i = 0; i < lam.size(); ++i)
        {
            if (lam(i) <= 1e-14 * top)
                continue;
            // row i of F = sqrt(lam_i) u_i^H
            const CVector f = std::sqrt(lam(i)) * es.eigenvectors().col(i).conjugate();
            for (int j = 0; j < L.n_cols; ++j)
                linear_rows(f, j, 2.0);
        }
        prob.cones.soc.push_back(static_cast<int>(b.size() - start));

        for (int j = 0; j < L.n_cols; ++j)
            for (int n = 0; n < nt; ++n)
            {
                prob.c(L.re(n, j)) = -2.0 * obj->D(n, j).real();
                prob.c(L.im(n, j)) = -2.0 * obj->D(n, j).imag();
            }
        prob.c(t) = 1.0;
    }

    prob.b = Eigen::Map<const RVector>(b.data(), static_cast<Eigen::Index>(b.size()));
    prob.A.resize(prob.b.size(), L.n_vars());
    prob.A.setFromTriplets(trips.begin(), trips.end());
    prob.validate();
    return prob;
}

std::vector<UserDiagnostic> user_diagnostics(const Scenario &sc)
{
    std::vector<UserDiagnostic> out;
    for (int k = 0; k < sc.config.n_users; ++k)
        out.push_back({k, sc.config.gamma(k), sqinr_ceiling(sc.profile.alpha_user(k)),
                       std::numeric_limits<double>::quiet_NaN()});
    return out;
}

// initialize() on an already normalized scenario.
CMatrix initialize_normalized(const Scenario &sc, const MMSettings &settings)
{
    const int K = sc.config.n_users;
    const int nt = sc.config.n_tx;
    const CMatrix U = mrt_directions(sc);

    // radar column along the strongest right singular vector of the target
    Eigen::JacobiSVD<CMatrix> svd(sc.channels.G, Eigen::ComputeThinV);
    const CVector v = svd.matrixV().col(0);
    double weighted = 0.0;
    for (int n = 0; n < nt; ++n)
        weighted += sc.profile.alpha_t(n) * std::norm(v(n));

    const double top = std::pow(10.0, settings.init_margin_db / 10.0);
    for (double share : {0.5, 0.25, 0.1, 0.0})
    {
        const CVector w_r = std::sqrt(share * sc.config.power_w / weighted) * v;
        // bisection on the margin (in dB) between 0 and the requested value
        double lo = 0.0, hi = settings.init_margin_db;
        std::optional<CMatrix> best = mrt_with_margin(sc, U, w_r, top);
        if (best)
            return *best;
        if (!mrt_with_margin(sc, U, w_r, 1.0))
            continue;
        best = mrt_with_margin(sc, U, w_r, 1.0);
        for (int it = 0; it < 20; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            if (auto cand = mrt_with_margin(sc, U, w_r, std::pow(10.0, mid / 10.0)))
            {
                lo = mid;
                best = std::move(cand);
            }
            else
                hi = mid;
        }
        return *best;
    }

    spdlog::debug("mm: MRT start failed, solving the SQINR feasibility program");
    const auto prob = build_program(sc, nullptr);
    const auto solver = settings.solver ? settings.solver : conic::default_solver();
    const auto sol = solver->solve(prob, settings.conic);
    if (sol.status == conic::ConicStatus::Infeasible)
        throw InfeasibleError("SQINR thresholds cannot be met within the power budget", user_diagnostics(sc));
    if (!sol.optimal())
        throw SolverFailure("SQINR feasibility program ended with status " + conic::to_string(sol.status));
    (void)K;
    return MMLayout{nt, n_cols(sc)}.unpack(sol.x);
}

} // namespace

double SurrogateQuadratic::evaluate(const CMatrix &V) const
{
    return 2.0 * (V.adjoint() * D).trace().real() - (V.adjoint() * M * V).trace().real() - constant;
}

RVector MMLayout::pack(const CMatrix &V) const
{
    RVector x = RVector::Zero(n_vars());
    for (int j = 0; j < n_cols; ++j)
        for (int n = 0; n < n_tx; ++n)
        {
            x(re(n, j)) = V(n, j).real();
            x(im(n, j)) = V(n, j).imag();
        }
    return x;
}

CMatrix MMLayout::unpack(const RVector &x) const
{
    require(x.size() >= epigraph(), "MMLayout::unpack: vector too short");
    CMatrix V(n_tx, n_cols);
    for (int j = 0; j < n_cols; ++j)
        for (int n = 0; n < n_tx; ++n)
            V(n, j) = cdouble(x(re(n, j)), x(im(n, j)));
    return V;
}

double objective_f(const CMatrix &V, const Scenario &scenario)
{
    check_dims(V, scenario);
    const CMatrix X = compute_x(V, scenario);
    const auto llt = factor_z(compute_z(V, scenario));
    return (X * llt.solve(CMatrix(X.adjoint()))).trace().real();
}

MMState make_state(const CMatrix &V, const Scenario &scenario)
{
    check_dims(V, scenario);
    MMState st;
    st.V = V;
    st.X = compute_x(V, scenario);
    st.Z = compute_z(V, scenario);
    st.f = (st.X * factor_z(st.Z).solve(CMatrix(st.X.adjoint()))).trace().real();
    return st;
}

double surrogate_g(const CMatrix &V, const MMState &state, const Scenario &scenario)
{
    check_dims(V, scenario);
    const auto llt = factor_z(state.Z);
    const CMatrix zx = llt.solve(CMatrix(state.X.adjoint())); // Z_m^-1 X_m^H
    const CMatrix C = hermitian_part(zx * zx.adjoint());
    const CMatrix X = compute_x(V, scenario);
    return 2.0 * (zx * X).trace().real() - (C * compute_z(V, scenario)).trace().real();
}

SurrogateQuadratic surrogate_terms(const MMState &state, const Scenario &sc)
{
    const CMatrix &G = sc.channels.G;
    const RVector &at = sc.profile.alpha_t;
    const RVector &ar = sc.profile.alpha_r;
    const auto At = at.cast<cdouble>().asDiagonal();
    const auto Ar = ar.cast<cdouble>().asDiagonal();

    const auto llt = factor_z(state.Z);
    const CMatrix zx = llt.solve(CMatrix(state.X.adjoint()));
    const CMatrix C = hermitian_part(zx * zx.adjoint());

    const RVector dr = C.diagonal().real().cwiseProduct(ar.cwiseProduct(RVector::Ones(ar.size()) - ar));
    const auto Dr = dr.cast<cdouble>().asDiagonal();

    SurrogateQuadratic q;
    q.D = At * (G.adjoint() * (Ar * zx));
    const CMatrix ArG = Ar * G;
    const CMatrix M1 = ArG.adjoint() * C * ArG + G.adjoint() * Dr * G;
    const CMatrix GAt = G * At;
    q.M = GAt.adjoint() * Dr * GAt;
    for (Eigen::Index n = 0; n < at.size(); ++n)
        q.M(n, n) += M1(n, n).real() * at(n) * (1.0 - at(n));
    q.M = hermitian_part(q.M);
    q.constant = sc.config.sigma_r2 * ((C.diagonal().real().cwiseProduct(ar.cwiseAbs2())).sum() + dr.sum());
    return q;
}

conic::ConicProblem build_subproblem(const MMState &state, const Scenario &scenario, bool feasibility)
{
    if (feasibility)
        return build_program(scenario, nullptr);
    const SurrogateQuadratic q = surrogate_terms(state, scenario);
    return build_program(scenario, &q);
}

double max_constraint_violation(const CMatrix &V, const Scenario &sc)
{
    check_dims(V, sc);
    const int K = sc.config.n_users;
    const CMatrix W_c = V.leftCols(K);
    const CMatrix W_r = V.rightCols(sc.config.n_tx);
    double worst = (transmit_power(sc.profile.alpha_t, V * V.adjoint()) - sc.config.power_w) / sc.config.power_w;
    for (int k = 0; k < K; ++k)
    {
        const double s = sqinr(k, W_c, W_r, sc.channels.user(k), sc.profile, sc.config.sigma_k2);
        worst = std::max(worst, (sc.config.gamma(k) - s) / sc.config.gamma(k));
    }
    return worst;
}

CMatrix initialize(const Scenario &scenario, const MMSettings &settings)
{
    scenario.validate();
    check_sqinr_ceilings(scenario);
    const double p = reference_power(scenario, settings.reference_power);
    return initialize_normalized(normalized(scenario, p), settings) * std::sqrt(p);
}

void write_trace_csv(std::ostream &os, const std::vector<MMTraceRow> &rows)
{
    os << "iteration,f,max_violation,conic_iterations\n";
    os.precision(17);
    for (const auto &r : rows)
        os << r.iteration << ',' << r.f << ',' << r.max_violation << ',' << r.subproblem_iterations << '\n';
}

MMResult run_mm(const Scenario &scenario, const MMSettings &settings, const CMatrix &start)
{
    const auto t0 = std::chrono::steady_clock::now();
    scenario.validate();
    check_sqinr_ceilings(scenario);
    require(settings.eps > 0.0 && settings.max_iters >= 0, "run_mm: bad settings");

    const double p = reference_power(scenario, settings.reference_power);
    const Scenario ns = normalized(scenario, p);
    const int K = ns.config.n_users;
    const int nt = ns.config.n_tx;
    const MMLayout layout{nt, n_cols(ns)};

    CMatrix V0;
    if (start.size() > 0)
    {
        check_dims(start, scenario);
        V0 = start / std::sqrt(p);
    }
    else
        V0 = initialize_normalized(ns, settings);

    MMState state = make_state(V0, ns);
    state.history.push_back(state.f);

    MMResult result;
    result.trace.push_back({0, state.f, max_constraint_violation(V0, ns), 0});

    const auto solver = settings.solver ? settings.solver : conic::default_solver();
    std::string status = "max_iters";
    int conic_total = 0;
    RVector last_y;
    conic::ConicSolution last;

    for (int it = 1; it <= settings.max_iters; ++it)
    {
        const SurrogateQuadratic q = surrogate_terms(state, ns);
        const conic::ConicProblem prob = build_program(ns, &q);

        conic::ConicSettings cs = settings.conic;
        cs.x0 = layout.pack(state.V);
        cs.x0(layout.epigraph()) = (state.V.adjoint() * q.M * state.V).trace().real();
        cs.s0 = prob.b - prob.A * cs.x0;
        if (last_y.size() == prob.m())
            cs.y0 = last_y;

        last = solver->solve(prob, cs);
        conic_total += last.iterations;
        if (!last.optimal())
        {
            status = "subproblem_" + conic::to_string(last.status);
            spdlog::warn("mm: subproblem {} ended with status {}", it, conic::to_string(last.status));
            break;
        }
        last_y = last.y;

        CMatrix V = layout.unpack(last.x);
        CMatrix W_c = V.leftCols(K);
        phase_align(W_c, ns.channels, ns.profile.alpha_t);
        V.leftCols(K) = W_c;

        const double f = objective_f(V, ns);
        const double scale = std::max(1.0, std::abs(state.f));
        spdlog::debug("mm: iter {} f {:.12g} conic iters {}", it, f, last.iterations);
        if (f < state.f)
        {
            // no ascent left within the subproblem accuracy
            status = (state.f - f) / scale > 1e-6 ? "stalled" : "converged";
            break;
        }
        const double change = (f - state.f) / scale;
        auto history = std::move(state.history);
        state = make_state(V, ns);
        state.iteration = it;
        history.push_back(f);
        state.history = std::move(history);
        result.trace.push_back({it, f, max_constraint_violation(V, ns), last.iterations});
        if (change < settings.eps)
        {
            status = "converged";
            break;
        }
    }

    BeamformingSolution &sol = result.solution;
    const CMatrix V = state.V * std::sqrt(p);
    sol.W_c = V.leftCols(K);
    sol.W_r = V.rightCols(nt);
    evaluate_solution(sol, scenario);
    sol.solver_info.solver = "mm";
    sol.solver_info.status = status;
    sol.solver_info.iterations = state.iteration;
    sol.solver_info.conic_iterations = conic_total;
    sol.solver_info.primal_residual = last.primal_residual;
    sol.solver_info.dual_residual = last.dual_residual;
    sol.solver_info.objective_history = state.history;
    sol.solver_info.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

BeamformingSolution solve_mm(const Scenario &scenario, const MMSettings &settings)
{
    return run_mm(scenario, settings).solution;
}

} // namespace quantbeam
