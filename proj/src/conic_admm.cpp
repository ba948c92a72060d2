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

// ADMM on the splitting {A x~ + s~ = b} x {s in K} with consensus x~ = x,
// s~ = s (OSQP/COSMO style). Per iteration:
//
//   (sigma I + A'RA) x~ = sigma x - c + A'(R(b - s) - y)
//   s~  = b - A x~
//   x+  = a x~ + (1 - a) x,      s^ = a s~ + (1 - a) s
//   s+  = Proj_K(s^ - y / R)
//   y+  = y + R (s+ - s^)
//
// y stays in K* by Moreau's decomposition provided R is constant on every
// SOC/PSD block. Data are Ruiz-equilibrated; the step matrix R = rho I (times
// 1e3 on zero-cone rows) adapts by balancing primal and dual residuals.

#include "quantbeam/conic.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace quantbeam::conic
{

namespace
{

using Clock = std::chrono::steady_clock;

double inf_norm(const RVector &v)
{
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

/// Solves (sigma I + A'RA) x = r. Rows with many nonzeros are split off and
/// handled with a Woodbury correction so that the sparse factor stays sparse.
class KktSystem
{
public:
    KktSystem(const SparseMatrix &a, double sigma) : sigma_(sigma), n_(a.cols())
    {
        const SparseMatrix at = a.transpose();
        RowMajor rows(a);
        const Eigen::Index dense_threshold = std::max<Eigen::Index>(64, n_ / 8);
        std::vector<Triplet> sparse_trip;
        for (Eigen::Index i = 0; i < rows.outerSize(); ++i)
        {
            const Eigen::Index nnz = rows.outerIndexPtr()[i + 1] - rows.outerIndexPtr()[i];
            if (nnz > dense_threshold)
                dense_rows_.push_back(i);
            else
                sparse_rows_.push_back(i);
        }
        // Only split when every variable still appears in a sparse row;
        // otherwise the sparse factor is near-singular and Woodbury loses
        // accuracy.
        if (!dense_rows_.empty())
        {
            std::vector<bool> covered(static_cast<std::size_t>(n_), false);
            for (Eigen::Index i : sparse_rows_)
                for (RowMajor::InnerIterator it(rows, i); it; ++it)
                    covered[static_cast<std::size_t>(it.col())] = true;
            if (std::find(covered.begin(), covered.end(), false) != covered.end())
            {
                sparse_rows_.insert(sparse_rows_.end(), dense_rows_.begin(), dense_rows_.end());
                std::sort(sparse_rows_.begin(), sparse_rows_.end());
                dense_rows_.clear();
            }
        }

        std::vector<Triplet> trip;
        for (std::size_t k = 0; k < sparse_rows_.size(); ++k)
            for (RowMajor::InnerIterator it(rows, sparse_rows_[k]); it; ++it)
                trip.emplace_back(static_cast<Eigen::Index>(k), it.col(), it.value());
        a_sparse_.resize(static_cast<Eigen::Index>(sparse_rows_.size()), n_);
        a_sparse_.setFromTriplets(trip.begin(), trip.end());

        a_dense_ = RMatrix::Zero(static_cast<Eigen::Index>(dense_rows_.size()), n_);
        for (std::size_t k = 0; k < dense_rows_.size(); ++k)
            for (RowMajor::InnerIterator it(rows, dense_rows_[k]); it; ++it)
                a_dense_(static_cast<Eigen::Index>(k), it.col()) = it.value();

        // decide between a dense and a sparse factorization of the sparse part
        const SparseMatrix gram = SparseMatrix(a_sparse_.transpose()) * a_sparse_;
        const double density = static_cast<double>(gram.nonZeros()) / (static_cast<double>(n_) * n_ + 1.0);
        use_dense_ = n_ <= 300 || density > 0.2;
        if (use_dense_ && !dense_rows_.empty())
        {
            // no point splitting when the factor is dense anyway
            sparse_rows_.insert(sparse_rows_.end(), dense_rows_.begin(), dense_rows_.end());
            std::sort(sparse_rows_.begin(), sparse_rows_.end());
            dense_rows_.clear();
            trip.clear();
            for (std::size_t k = 0; k < sparse_rows_.size(); ++k)
                for (RowMajor::InnerIterator it(rows, sparse_rows_[k]); it; ++it)
                    trip.emplace_back(static_cast<Eigen::Index>(k), it.col(), it.value());
            a_sparse_.resize(static_cast<Eigen::Index>(sparse_rows_.size()), n_);
            a_sparse_.setFromTriplets(trip.begin(), trip.end());
            a_dense_.resize(0, n_);
        }
        a_sparse_t_ = a_sparse_.transpose();
        if (!use_dense_)
        {
            SparseMatrix pattern = a_sparse_t_ * a_sparse_;
            pattern += sigma_ * identity();
            ldlt_.analyzePattern(pattern);
        }
    }

    void factor(const RVector &rho)
    {
        RVector rho_s(static_cast<Eigen::Index>(sparse_rows_.size()));
        for (std::size_t k = 0; k < sparse_rows_.size(); ++k)
            rho_s(static_cast<Eigen::Index>(k)) = rho(sparse_rows_[k]);
        rho_dense_.resize(static_cast<Eigen::Index>(dense_rows_.size()));
        for (std::size_t k = 0; k < dense_rows_.size(); ++k)
            rho_dense_(static_cast<Eigen::Index>(k)) = rho(dense_rows_[k]);
        rho_sparse_ = rho_s;

        if (use_dense_)
        {
            RMatrix m = RMatrix(a_sparse_t_ * rho_s.asDiagonal() * a_sparse_);
            m.diagonal().array() += sigma_;
            dense_llt_.compute(m);
            if (dense_llt_.info() != Eigen::Success)
                throw NumericalError("conic: KKT factorization failed");
            return;
        }
        SparseMatrix m = a_sparse_t_ * rho_s.asDiagonal() * a_sparse_;
        m += sigma_ * identity();
        ldlt_.factorize(m);
        if (ldlt_.info() != Eigen::Success)
            throw NumericalError("conic: KKT factorization failed");
        if (!dense_rows_.empty())
        {
            woodbury_z_ = ldlt_.solve(RMatrix(a_dense_.transpose()));
            RMatrix cap = a_dense_ * woodbury_z_;
            cap.diagonal() += rho_dense_.cwiseInverse();
            cap_ldlt_.compute(cap);
        }
    }

    RVector solve(const RVector &r) const
    {
        RVector x = raw_solve(r);
        // one step of iterative refinement against the exact operator
        const RVector res = r - apply(x);
        x += raw_solve(res);
        return x;
    }

private:
    using RowMajor = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    SparseMatrix identity() const
    {
        SparseMatrix id(n_, n_);
        id.setIdentity();
        return id;
    }

    RVector apply(const RVector &x) const
    {
        RVector out = sigma_ * x;
        out += a_sparse_t_ * (rho_sparse_.asDiagonal() * (a_sparse_ * x));
        if (a_dense_.rows() > 0)
            out += a_dense_.transpose() * (rho_dense_.asDiagonal() * (a_dense_ * x));
        return out;
    }

    RVector raw_solve(const RVector &r) const
    {
        if (use_dense_)
            return dense_llt_.solve(r);
        RVector t = ldlt_.solve(r);
        if (a_dense_.rows() > 0)
            t -= woodbury_z_ * cap_ldlt_.solve(a_dense_ * t);
        return t;
    }

    double sigma_;
    Eigen::Index n_;
    std::vector<Eigen::Index> sparse_rows_, dense_rows_;
    SparseMatrix a_sparse_, a_sparse_t_;
    RMatrix a_dense_;
    RVector rho_sparse_, rho_dense_;
    bool use_dense_ = false;
    Eigen::LLT<RMatrix> dense_llt_;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
    RMatrix woodbury_z_;
    Eigen::LDLT<RMatrix> cap_ldlt_;
};

struct Scaling
{
    RVector d; ///< row scaling
    RVector e; ///< column scaling
    double cost = 1.0;
};

/// Ruiz equilibration that keeps one scale per SOC / PSD block.
Scaling equilibrate(SparseMatrix &a, const ConeSpec &cones, int iters)
{
    const auto m = a.rows();
    const auto n = a.cols();
    Scaling sc{RVector::Ones(m), RVector::Ones(n), 1.0};
    auto clamp = [](double v) { return std::clamp(v, 1e-4, 1e4); };
    for (int it = 0; it < iters; ++it)
    {
        RVector row_norm = RVector::Zero(m);
        RVector col_norm = RVector::Zero(n);
        for (int k = 0; k < a.outerSize(); ++k)
            for (SparseMatrix::InnerIterator i(a, k); i; ++i)
            {
                const double v = std::abs(i.value());
                row_norm(i.row()) = std::max(row_norm(i.row()), v);
                col_norm(i.col()) = std::max(col_norm(i.col()), v);
            }
        Eigen::Index off = cones.zero + cones.nonneg;
        auto unify = [&](Eigen::Index len) {
            const double mx = row_norm.segment(off, len).maxCoeff();
            row_norm.segment(off, len).setConstant(mx);
            off += len;
        };
        for (int d : cones.soc)
            unify(d);
        for (int s : cones.psd)
            unify(svec_size(s));

        RVector dr(m), dc(n);
        for (Eigen::Index i = 0; i < m; ++i)
            dr(i) = row_norm(i) < 1e-8 ? 1.0 : clamp(1.0 / std::sqrt(row_norm(i)));
        for (Eigen::Index j = 0; j < n; ++j)
            dc(j) = col_norm(j) < 1e-8 ? 1.0 : clamp(1.0 / std::sqrt(col_norm(j)));
        a = dr.asDiagonal() * a * dc.asDiagonal();
        sc.d = sc.d.cwiseProduct(dr);
        sc.e = sc.e.cwiseProduct(dc);
        if ((dr.array() - 1.0).abs().maxCoeff() < 1e-3 && (dc.array() - 1.0).abs().maxCoeff() < 1e-3)
            break;
    }
    return sc;
}

/// Distance of v to the cone K (or K*), in the infinity norm.
double cone_distance(const RVector &v, const ConeSpec &cones, bool dual)
{
    RVector p = v;
    if (dual)
        project_dual_cone(p, cones);
    else
        project_cone(p, cones);
    return inf_norm(v - p);
}

} // namespace

ConicSolution AdmmSolver::solve(const ConicProblem &problem, const ConicSettings &st) const
{
    problem.validate();
    const auto start = Clock::now();
    const auto n = problem.n();
    const auto m = problem.m();
    const ConeSpec &cones = problem.cones;

    // scaled data
    SparseMatrix a = problem.A;
    a.makeCompressed();
    Scaling sc = equilibrate(a, cones, st.equilibration_iters);
    RVector b = sc.d.cwiseProduct(problem.b);
    RVector c = sc.e.cwiseProduct(problem.c);
    sc.cost = std::clamp(1.0 / std::max(inf_norm(c), 1e-4), 1e-4, 1e4);
    c *= sc.cost;
    const SparseMatrix at = a.transpose();

    RVector x = RVector::Zero(n), s = RVector::Zero(m), y = RVector::Zero(m);
    if (st.x0.size() == n)
        x = st.x0.cwiseQuotient(sc.e);
    if (st.s0.size() == m)
    {
        s = sc.d.cwiseProduct(st.s0);
        project_cone(s, cones);
    }
    if (st.y0.size() == m)
    {
        y = st.y0.cwiseQuotient(sc.d) * sc.cost;
        project_dual_cone(y, cones);
    }

    double rho = st.rho;
    auto rho_vector = [&](double r) {
        RVector v = RVector::Constant(m, r);
        v.head(cones.zero).setConstant(1e3 * r);
        return v;
    };
    RVector rvec = rho_vector(rho);
    KktSystem kkt(a, st.sigma);
    kkt.factor(rvec);

    ConicSolution sol;
    sol.factorizations = 1;

    auto unscale = [&](const RVector &xs, const RVector &ss, const RVector &ys) {
        sol.x = sc.e.cwiseProduct(xs);
        sol.s = ss.cwiseQuotient(sc.d);
        sol.y = sc.d.cwiseProduct(ys) / sc.cost;
    };

    const double norm_b = problem.b.norm();
    const double norm_c = problem.c.norm();

    RVector x_prev = x, y_prev = y;
    int k = 0;
    for (k = 1; k <= st.max_iters; ++k)
    {
        x_prev = x;
        y_prev = y;
        const RVector rhs = st.sigma * x - c + at * (rvec.cwiseProduct(b - s) - y);
        const RVector xt = kkt.solve(rhs);
        const RVector s_tilde = b - a * xt;
        x = st.alpha * xt + (1.0 - st.alpha) * x;
        const RVector s_rel = st.alpha * s_tilde + (1.0 - st.alpha) * s;
        RVector s_new = s_rel - y.cwiseQuotient(rvec);
        project_cone(s_new, cones);
        y += rvec.cwiseProduct(s_new - s_rel);
        s = std::move(s_new);

        const bool last = (k == st.max_iters);
        if (k % st.check_interval != 0 && !last)
            continue;

        // --- convergence in the original units ---
        unscale(x, s, y);
        const RVector ax = problem.A * sol.x;
        const RVector aty = problem.A.transpose() * sol.y;
        const RVector rp = ax + sol.s - problem.b;
        const RVector rd = aty + problem.c;
        const double pobj = problem.c.dot(sol.x);
        const double dobj = -problem.b.dot(sol.y);
        sol.primal_residual = rp.norm() / (1.0 + norm_b);
        sol.dual_residual = rd.norm() / (1.0 + norm_c);
        sol.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        sol.objective = pobj;
        sol.dual_objective = dobj;
        sol.iterations = k;
        if (st.on_iteration)
            st.on_iteration({k, pobj, dobj, sol.primal_residual, sol.dual_residual, rho});

        const bool p_ok = rp.norm() <= st.eps_abs + st.eps_rel * norm_b;
        const bool d_ok = rd.norm() <= st.eps_abs + st.eps_rel * norm_c;
        const bool g_ok = std::abs(pobj - dobj) <= st.eps_abs + st.eps_rel * std::max(std::abs(pobj), std::abs(dobj));
        if (p_ok && d_ok && g_ok)
        {
            sol.status = ConicStatus::Optimal;
            break;
        }

        // --- infeasibility certificates from the successive differences ---
        {
            const RVector dy = sc.d.cwiseProduct(y - y_prev);
            const double ndy = inf_norm(dy);
            if (ndy > 1e-12)
            {
                const double eps = st.eps_infeasible;
                const RVector atdy = problem.A.transpose() * dy;
                // cheap tests first; the cone distance needs a projection
                if (problem.b.dot(dy) < -eps * ndy && inf_norm(atdy) <= eps * ndy &&
                    cone_distance(dy, cones, true) <= eps * ndy)
                {
                    sol.status = ConicStatus::Infeasible;
                    sol.y = dy / ndy;
                    break;
                }
            }
            const RVector dx = sc.e.cwiseProduct(x - x_prev);
            const double ndx = inf_norm(dx);
            if (ndx > 1e-12)
            {
                const double eps = st.eps_infeasible;
                if (problem.c.dot(dx) < -eps * ndx &&
                    cone_distance(-(problem.A * dx), cones, false) <= eps * ndx)
                {
                    sol.status = ConicStatus::Unbounded;
                    sol.x = dx / ndx;
                    break;
                }
            }
        }

        if (st.time_limit > 0.0 &&
            std::chrono::duration<double>(Clock::now() - start).count() > st.time_limit)
            break;

        // --- residual balancing on the relative residuals used for termination ---
        if (st.adaptive_rho && k % (5 * st.check_interval) == 0 && sol.primal_residual > 0.0 &&
            sol.dual_residual > 0.0)
        {
            const double ratio = std::sqrt(sol.primal_residual / sol.dual_residual);
            if (ratio > st.adaptive_rho_tolerance || ratio < 1.0 / st.adaptive_rho_tolerance)
            {
                rho = std::clamp(rho * ratio, 1e-6, 1e6);
                rvec = rho_vector(rho);
                kkt.factor(rvec);
                ++sol.factorizations;
            }
        }
    }

    if (sol.status == ConicStatus::Optimal || sol.status == ConicStatus::MaxIters)
        unscale(x, s, y);
    sol.iterations = std::min(k, st.max_iters);
    sol.solve_time = std::chrono::duration<double>(Clock::now() - start).count();
    return sol;
}

std::shared_ptr<const ConicSolver> default_solver()
{
    static const auto solver = std::make_shared<const AdmmSolver>();
    return solver;
}

} // namespace quantbeam::conic
