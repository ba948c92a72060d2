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

#include "quantbeam/conic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace quantbeam::conic
{

namespace
{

using Clock = std::chrono::steady_clock;

// Cone part of a program with dense data; zero-cone rows live in (a0, b0).
struct Program
{
    RMatrix ak; ///< cone rows
    RVector bk;
    RMatrix a0; ///< equality rows
    RVector b0;
    RVector c;
    int nonneg = 0;
    std::vector<int> soc;
    std::vector<int> psd;

    [[nodiscard]] Eigen::Index n() const { return c.size(); }

    [[nodiscard]] double degree() const
    {
        double nu = nonneg + 2.0 * static_cast<double>(soc.size());
        for (int q : psd)
            nu += q;
        return nu;
    }
};

// Barrier value, gradient and the PSD inverses at a slack vector.
struct BarrierPoint
{
    double value = 0.0;
    RVector grad; ///< d phi / d s
    std::vector<RMatrix> inv;
};

bool evaluate(const Program &p, const RVector &s, BarrierPoint &out)
{
    out.value = 0.0;
    out.grad.resize(s.size());
    out.inv.clear();
    Eigen::Index off = 0;
    for (int i = 0; i < p.nonneg; ++i, ++off)
    {
        if (!(s(off) > 0.0))
            return false;
        out.value -= std::log(s(off));
        out.grad(off) = -1.0 / s(off);
    }
    for (int q : p.soc)
    {
        const double t = s(off);
        const double d = t * t - s.segment(off + 1, q - 1).squaredNorm();
        if (!(t > 0.0) || !(d > 0.0))
            return false;
        out.value -= std::log(d);
        out.grad(off) = -2.0 * t / d;
        out.grad.segment(off + 1, q - 1) = 2.0 * s.segment(off + 1, q - 1) / d;
        off += q;
    }
    for (int q : p.psd)
    {
        const Eigen::Index len = svec_size(q);
        const RMatrix S = smat(s.segment(off, len), q);
        Eigen::LLT<RMatrix> llt(S);
        if (llt.info() != Eigen::Success)
            return false;
        const RMatrix &L = llt.matrixLLT();
        double logdet = 0.0;
        for (int i = 0; i < q; ++i)
        {
            if (!(L(i, i) > 0.0))
                return false;
            logdet += 2.0 * std::log(L(i, i));
        }
        out.value -= logdet;
        RMatrix inv = llt.solve(RMatrix::Identity(q, q));
        inv = 0.5 * (inv + inv.transpose()).eval();
        out.grad.segment(off, len) = -svec(inv);
        out.inv.push_back(std::move(inv));
        off += len;
    }
    return std::isfinite(out.value);
}

// A_k' (d^2 phi / d s^2) A_k.
RMatrix hessian(const Program &p, const RVector &s, const BarrierPoint &bp)
{
    const Eigen::Index n = p.n();
    RMatrix h = RMatrix::Zero(n, n);
    Eigen::Index off = 0;
    if (p.nonneg > 0)
    {
        const auto rows = p.ak.middleRows(0, p.nonneg);
        const RVector w = s.head(p.nonneg).array().inverse().square();
        h.noalias() += rows.transpose() * w.asDiagonal() * rows;
        off = p.nonneg;
    }
    for (int q : p.soc)
    {
        const auto rows = p.ak.middleRows(off, q);
        const RVector v = s.segment(off, q);
        const double d = v(0) * v(0) - v.tail(q - 1).squaredNorm();
        RVector jv = -v;
        jv(0) = v(0);
        // -2 J / d + 4 (J v)(J v)' / d^2
        RMatrix jr = -rows;
        jr.row(0) = rows.row(0);
        h.noalias() += (-2.0 / d) * (rows.transpose() * jr);
        const RVector g = rows.transpose() * jv;
        h.noalias() += (4.0 / (d * d)) * g * g.transpose();
        off += q;
    }
    std::size_t blk = 0;
    for (int q : p.psd)
    {
        const Eigen::Index len = svec_size(q);
        const auto rows = p.ak.middleRows(off, len);
        const RMatrix &inv = bp.inv[blk++];
        RMatrix sp(len, n);
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const RVector col = rows.col(j);
            if (col.isZero(0.0))
            {
                sp.col(j).setZero();
                continue;
            }
            sp.col(j) = svec(inv * smat(col, q) * inv);
        }
        h.noalias() += rows.transpose() * sp;
        off += len;
    }
    return 0.5 * (h + h.transpose());
}

// (d^2 phi / d s^2) ds.
RVector hessian_apply(const Program &p, const RVector &s, const BarrierPoint &bp, const RVector &ds)
{
    RVector out(s.size());
    Eigen::Index off = 0;
    for (int i = 0; i < p.nonneg; ++i, ++off)
        out(off) = ds(off) / (s(off) * s(off));
    for (int q : p.soc)
    {
        const RVector v = s.segment(off, q);
        const RVector dv = ds.segment(off, q);
        const double d = v(0) * v(0) - v.tail(q - 1).squaredNorm();
        RVector jv = -v, jdv = -dv;
        jv(0) = v(0);
        jdv(0) = dv(0);
        out.segment(off, q) = (-2.0 / d) * jdv + (4.0 / (d * d)) * jv.dot(dv) * jv;
        off += q;
    }
    std::size_t blk = 0;
    for (int q : p.psd)
    {
        const Eigen::Index len = svec_size(q);
        const RMatrix &inv = bp.inv[blk++];
        out.segment(off, len) = svec(inv * smat(ds.segment(off, len), q) * inv);
        off += len;
    }
    return out;
}

// Strict membership in K (all cones here are self-dual).
bool interior(const Program &p, const RVector &y)
{
    BarrierPoint scratch;
    return evaluate(p, y, scratch);
}

// H d = r with symmetric Jacobi scaling and one refinement step; the
// Hessian's conditioning grows like t^2 along the path.
RVector newton_solve(const RMatrix &h, const RVector &r)
{
    const RVector dscale = h.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    RMatrix hs = dscale.asDiagonal() * h * dscale.asDiagonal();
    hs.diagonal().array() += 1e-15;
    const Eigen::LDLT<RMatrix> ldlt(hs);
    const RVector rs = dscale.cwiseProduct(r);
    RVector z = ldlt.solve(rs);
    z += ldlt.solve(RVector(rs - hs * z));
    return dscale.cwiseProduct(z);
}

// Deficiency of s with respect to the interior: the smallest tau with
// s + tau e in K (e is the cone's identity element).
double deficiency(const Program &p, const RVector &s)
{
    double worst = -std::numeric_limits<double>::infinity();
    Eigen::Index off = 0;
    for (int i = 0; i < p.nonneg; ++i, ++off)
        worst = std::max(worst, -s(off));
    for (int q : p.soc)
    {
        worst = std::max(worst, s.segment(off + 1, q - 1).norm() - s(off));
        off += q;
    }
    for (int q : p.psd)
    {
        const Eigen::Index len = svec_size(q);
        Eigen::SelfAdjointEigenSolver<RMatrix> es(smat(s.segment(off, len), q), Eigen::EigenvaluesOnly);
        worst = std::max(worst, -es.eigenvalues()(0));
        off += len;
    }
    return worst;
}

RVector identity_element(const Program &p)
{
    RVector e = RVector::Zero(p.bk.size());
    Eigen::Index off = 0;
    for (int i = 0; i < p.nonneg; ++i)
        e(off++) = 1.0;
    for (int q : p.soc)
    {
        e(off) = 1.0;
        off += q;
    }
    for (int q : p.psd)
    {
        e.segment(off, svec_size(q)) = svec(RMatrix::Identity(q, q));
        off += svec_size(q);
    }
    return e;
}

enum class PathStatus
{
    Converged,
    Stopped, ///< the caller's predicate fired
    Unbounded,
    Limit,
    Stalled,
};

struct PathResult
{
    PathStatus status = PathStatus::Limit;
    RVector x;
    RVector y_cone;
    RVector y_eq;
    RVector direction; ///< recession direction when Unbounded
    double t = 0.0;
};

struct PathControl
{
    double eps_abs;
    double eps_rel;
    int max_newton;
    double time_limit;
    Clock::time_point start;
    const std::function<void(const IterationLog &)> *on_iteration = nullptr;
    /// Phase I: index of tau; the path stops at the first iterate with tau < 0.
    Eigen::Index tau = -1;
};

RVector equality_multipliers(const Program &p, const RVector &residual)
{
    // least-squares y0 with a0' y0 = -residual
    if (p.a0.rows() == 0)
        return RVector();
    return p.a0.transpose().colPivHouseholderQr().solve(-residual);
}

// Path following from a strictly feasible x satisfying the equalities.
PathResult follow_path(const Program &p, RVector x, const PathControl &ctl, int &newton_steps)
{
    PathResult res;
    const Eigen::Index n = p.n();
    const Eigen::Index ne = p.a0.rows();
    const double nu = std::max(p.degree(), 1.0);
    const double x_scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());

    BarrierPoint bp;
    RVector s = p.bk - p.ak * x;
    if (!evaluate(p, s, bp))
    {
        res.status = PathStatus::Stalled;
        return res;
    }

    // Newton steps move inside the null space of the equality rows
    RMatrix null;
    if (ne > 0)
    {
        Eigen::ColPivHouseholderQR<RMatrix> qr(p.a0.transpose());
        const RMatrix q = qr.householderQ();
        null = q.rightCols(n - qr.rank());
        if (null.cols() == 0)
        {
            res.status = PathStatus::Converged;
            res.x = x;
            res.t = std::numeric_limits<double>::infinity();
            res.y_cone = RVector::Zero(p.bk.size());
            res.y_eq = equality_multipliers(p, p.c);
            return res;
        }
    }

    double t = nu / std::max(1.0, std::abs(p.c.dot(x)));
    const double mu = 10.0;

    RVector last_dx = RVector::Zero(n);

    // A far-away iterate with a much lower objective gives the recession
    // direction x - x_start: -A d = (s(x) - s(x_start)) / |x - x_start| is
    // within |s(x_start)| / |x - x_start| of K.
    const RVector x_start = x;
    const double c_start = p.c.dot(x);
    auto escaping = [&]() {
        const RVector d = x - x_start;
        const double nd = d.lpNorm<Eigen::Infinity>();
        if (!(nd > 1e6 * x_scale) || !(p.c.dot(x) < c_start - 1e6 * (1.0 + std::abs(c_start))))
            return false;
        res.direction = d / nd;
        return true;
    };

    // Dual point from the linearized gradient at s - A dx; it satisfies
    // A'y + c = 0 up to the Newton solve. Falls back to -grad / t outside K*.
    auto dual_point = [&]() -> RVector {
        RVector y = -(bp.grad + hessian_apply(p, s, bp, -(p.ak * last_dx))) / t;
        if (!interior(p, y))
            y = -bp.grad / t;
        return y;
    };

    auto finish = [&](PathStatus st) {
        res.status = st;
        res.x = x;
        res.t = t;
        res.y_cone = dual_point();
        const RVector r = p.c + p.ak.transpose() * res.y_cone;
        res.y_eq = equality_multipliers(p, r);
        return res;
    };

    for (int outer = 0;; ++outer)
    {
        // --- centering at t ---
        double prev_decrement = std::numeric_limits<double>::infinity();
        for (int inner = 0; inner < 100; ++inner)
        {
            if (newton_steps >= ctl.max_newton)
                return finish(escaping() ? PathStatus::Unbounded : PathStatus::Limit);
            if (ctl.time_limit > 0.0 &&
                std::chrono::duration<double>(Clock::now() - ctl.start).count() > ctl.time_limit)
                return finish(PathStatus::Limit);

            const RVector g = t * p.c - p.ak.transpose() * bp.grad;
            const RMatrix h = hessian(p, s, bp);

            RVector dx;
            if (ne == 0)
                dx = newton_solve(h, -g);
            else
                dx = null * newton_solve(null.transpose() * h * null, -(null.transpose() * g));
            if (!dx.allFinite())
                return finish(PathStatus::Stalled);
            ++newton_steps;
            last_dx = dx;

            const double decrement = -g.dot(dx);
            // done when small, or when round-off stops the quadratic decrease
            if (!(decrement > 1e-10) || (decrement < 1e-6 && decrement > 0.25 * prev_decrement))
                break;
            prev_decrement = decrement;

            // backtracking: stay interior, then Armijo on t c'x + phi. In phase I
            // a step that crosses tau = 0 is cut to 1.5 times the crossing
            // length and taken as soon as it is interior.
            const double f0 = t * p.c.dot(x) + bp.value;
            double step = 1.0;
            bool crossing = false;
            if (ctl.tau >= 0 && dx(ctl.tau) < 0.0 && x(ctl.tau) + dx(ctl.tau) < 0.0)
            {
                crossing = true;
                step = std::min(1.0, 1.5 * x(ctl.tau) / -dx(ctl.tau));
            }
            BarrierPoint trial;
            RVector xn, sn;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls, step *= 0.5)
            {
                xn = x + step * dx;
                sn = p.bk - p.ak * xn;
                if (!evaluate(p, sn, trial))
                    continue;
                // inside the quadratic region (decrement below 1/16) a full
                // interior step is a guaranteed descent for a self-concordant
                // barrier, and f itself is too noisy to compare at large t
                if ((crossing && xn(ctl.tau) < 0.0) || (decrement < 0.0625 && step == 1.0) ||
                    t * p.c.dot(xn) + trial.value <= f0 - 0.25 * step * decrement)
                {
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
                break; // no further progress at this t (round-off level)
            x = std::move(xn);
            s = std::move(sn);
            bp = std::move(trial);
            last_dx.setZero();

            if (ctl.tau >= 0 && x(ctl.tau) < 0.0)
                return finish(PathStatus::Stopped);
            if (escaping())
                return finish(PathStatus::Unbounded);
        }

        // --- termination in the original units ---
        const RVector y_cone = dual_point();
        const RVector r = p.c + p.ak.transpose() * y_cone;
        const RVector y_eq = equality_multipliers(p, r);
        RVector rd = r;
        if (ne > 0)
            rd += p.a0.transpose() * y_eq;
        const double pobj = p.c.dot(x);
        const double dobj = -p.bk.dot(y_cone) - (ne > 0 ? p.b0.dot(y_eq) : 0.0);
        const double norm_c = p.c.norm();
        const double rp = ne > 0 ? (p.a0 * x - p.b0).norm() : 0.0;
        const double norm_b = std::sqrt(p.bk.squaredNorm() + p.b0.squaredNorm());

        if (ctl.on_iteration && *ctl.on_iteration)
            (*ctl.on_iteration)({newton_steps, pobj, dobj, rp / (1.0 + norm_b), rd.norm() / (1.0 + norm_c), t});

        const bool gap_ok = nu / t <= ctl.eps_abs + ctl.eps_rel * std::max(std::abs(pobj), std::abs(dobj)) &&
                            std::abs(pobj - dobj) <= ctl.eps_abs + ctl.eps_rel * std::max(std::abs(pobj), std::abs(dobj));
        const bool d_ok = rd.norm() <= ctl.eps_abs + ctl.eps_rel * norm_c;
        const bool p_ok = rp <= ctl.eps_abs + ctl.eps_rel * norm_b;
        if (gap_ok && d_ok && p_ok)
            return finish(PathStatus::Converged);
        if (escaping())
            return finish(PathStatus::Unbounded);
        if (t > 1e20)
            return finish(PathStatus::Stalled);
        t *= mu;
    }
}

Program split(const ConicProblem &problem)
{
    const auto &cones = problem.cones;
    const RMatrix a = RMatrix(problem.A);
    Program p;
    p.a0 = a.topRows(cones.zero);
    p.b0 = problem.b.head(cones.zero);
    p.ak = a.bottomRows(a.rows() - cones.zero);
    p.bk = problem.b.tail(a.rows() - cones.zero);
    p.c = problem.c;
    p.nonneg = cones.nonneg;
    p.soc = cones.soc;
    p.psd = cones.psd;
    return p;
}

} // namespace

ConicSolution BarrierSolver::solve(const ConicProblem &problem, const ConicSettings &st) const
{
    problem.validate();
    const auto start = Clock::now();
    const Program p = split(problem);
    const Eigen::Index n = p.n();
    const Eigen::Index ne = p.a0.rows();

    ConicSolution sol;
    sol.x = RVector::Zero(n);
    sol.y = RVector::Zero(problem.m());
    sol.s = RVector::Zero(problem.m());
    int newton = 0;

    PathControl ctl{st.eps_abs, st.eps_rel, st.max_iters, st.time_limit, start, &st.on_iteration, -1};

    auto done = [&]() -> ConicSolution & {
        sol.iterations = newton;
        sol.factorizations = newton;
        sol.solve_time = std::chrono::duration<double>(Clock::now() - start).count();
        return sol;
    };

    // --- a point satisfying the equalities ---
    RVector x = st.x0.size() == n ? st.x0 : RVector::Zero(n);
    if (ne > 0)
    {
        const auto qr = p.a0.colPivHouseholderQr();
        x += qr.solve(RVector(p.b0 - p.a0 * x));
        const RVector r = p.b0 - p.a0 * x;
        if (r.norm() > 1e-9 * (1.0 + p.b0.norm()))
        {
            // b0 - a0 x is orthogonal to range(a0): y = -r certifies infeasibility
            sol.status = ConicStatus::Infeasible;
            sol.y.head(ne) = -r / r.lpNorm<Eigen::Infinity>();
            return done();
        }
    }

    // --- phase I when x is not interior ---
    const double def = deficiency(p, p.bk - p.ak * x);
    const double scale = std::max(1.0, p.bk.lpNorm<Eigen::Infinity>());
    if (!(def < -1e-12 * scale))
    {
        Program q = p;
        q.ak.conservativeResize(Eigen::NoChange, n + 1);
        q.ak.col(n) = -identity_element(p);
        q.a0.conservativeResize(Eigen::NoChange, n + 1);
        if (ne > 0)
            q.a0.col(n).setZero();
        q.c = RVector::Zero(n + 1);
        q.c(n) = 1.0;
        RVector xt(n + 1);
        xt.head(n) = x;
        xt(n) = std::max(def, 0.0) + std::max(1.0, std::abs(def));

        PathControl ctl1 = ctl;
        ctl1.on_iteration = nullptr;
        ctl1.tau = n;
        const PathResult r1 = follow_path(q, xt, ctl1, newton);
        if (r1.status == PathStatus::Stopped)
            x = r1.x.head(n);
        else
        {
            const double tau = r1.x.size() > n ? r1.x(n) : std::numeric_limits<double>::quiet_NaN();
            if (r1.status == PathStatus::Converged && tau > st.eps_infeasible * scale)
            {
                // y >= 0 in K*, A'y = 0, e'y = 1 and b'y = -tau < 0
                sol.status = ConicStatus::Infeasible;
                RVector y = RVector::Zero(problem.m());
                if (ne > 0)
                    y.head(ne) = r1.y_eq;
                y.tail(p.bk.size()) = r1.y_cone;
                sol.y = y / y.lpNorm<Eigen::Infinity>();
                return done();
            }
            // no interior point found within the limits
            sol.status = ConicStatus::MaxIters;
            return done();
        }
    }

    const PathResult r = follow_path(p, x, ctl, newton);
    if (r.status == PathStatus::Unbounded && p.c.dot(r.direction) < 0.0)
    {
        sol.status = ConicStatus::Unbounded;
        sol.x = r.direction;
        return done();
    }

    sol.x = r.x;
    sol.s.tail(p.bk.size()) = p.bk - p.ak * r.x;
    if (ne > 0)
        sol.y.head(ne) = r.y_eq;
    sol.y.tail(p.bk.size()) = r.y_cone;
    const RVector rp = problem.A * sol.x + sol.s - problem.b;
    const RVector rd = problem.A.transpose() * sol.y + problem.c;
    sol.objective = problem.c.dot(sol.x);
    sol.dual_objective = -problem.b.dot(sol.y);
    sol.primal_residual = rp.norm() / (1.0 + problem.b.norm());
    sol.dual_residual = rd.norm() / (1.0 + problem.c.norm());
    sol.gap = std::abs(sol.objective - sol.dual_objective) /
              (1.0 + std::abs(sol.objective) + std::abs(sol.dual_objective));
    sol.status = r.status == PathStatus::Converged ? ConicStatus::Optimal : ConicStatus::MaxIters;
    return done();
}

std::shared_ptr<const ConicSolver> barrier_solver()
{
    static const auto solver = std::make_shared<const BarrierSolver>();
    return solver;
}

std::shared_ptr<const ConicSolver> solver_by_name(const std::string &name)
{
    if (name == "admm")
        return default_solver();
    if (name == "barrier")
        return barrier_solver();
    throw std::invalid_argument("unknown conic engine '" + name + "'");
}

} // namespace quantbeam::conic
