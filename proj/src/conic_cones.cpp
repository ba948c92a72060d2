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

// Cone geometry, Hermitian parametrization and problem I/O.

#include "quantbeam/conic.hpp"

#include <cmath>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace quantbeam::conic
{

namespace
{

constexpr double kSqrt2 = 1.4142135623730951;

Eigen::Index svec_index(Eigen::Index r, Eigen::Index c, Eigen::Index side)
{
    return c * side - c * (c - 1) / 2 + (r - c);
}

} // namespace

Eigen::Index ConeSpec::rows() const
{
    Eigen::Index m = zero + nonneg;
    for (int d : soc)
        m += d;
    for (int s : psd)
        m += svec_size(s);
    return m;
}

void ConicProblem::validate() const
{
    require(cones.zero >= 0 && cones.nonneg >= 0, "ConicProblem: negative cone size");
    for (int d : cones.soc)
        require(d >= 1, "ConicProblem: SOC dimension must be >= 1");
    for (int s : cones.psd)
        require(s >= 1, "ConicProblem: PSD side must be >= 1");
    require(A.rows() == b.size(), "ConicProblem: A has " + std::to_string(A.rows()) + " rows but b has " +
                                      std::to_string(b.size()));
    require(A.cols() == c.size(), "ConicProblem: A has " + std::to_string(A.cols()) + " columns but c has " +
                                      std::to_string(c.size()));
    require(cones.rows() == b.size(), "ConicProblem: cone sizes sum to " + std::to_string(cones.rows()) +
                                          " but there are " + std::to_string(b.size()) + " rows");
    require(c.allFinite() && b.allFinite(), "ConicProblem: non-finite data");
}

std::string to_string(ConicStatus s)
{
    switch (s)
    {
    case ConicStatus::Optimal:
        return "optimal";
    case ConicStatus::Infeasible:
        return "infeasible";
    case ConicStatus::Unbounded:
        return "unbounded";
    case ConicStatus::MaxIters:
        return "max_iters";
    }
    return "unknown";
}

RVector project_soc(const RVector &v)
{
    require(v.size() >= 1, "project_soc: empty vector");
    const double t = v(0);
    const double nx = v.tail(v.size() - 1).norm();
    if (nx <= t)
        return v;
    if (nx <= -t)
        return RVector::Zero(v.size());
    const double a = 0.5 * (t + nx);
    RVector out(v.size());
    out(0) = a;
    out.tail(v.size() - 1) = (a / nx) * v.tail(v.size() - 1);
    return out;
}

RMatrix project_psd(const RMatrix &m)
{
    require(m.rows() == m.cols(), "project_psd: matrix must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * scale, "project_psd: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (m + m.transpose()));
    const RVector lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

RVector svec(const RMatrix &m)
{
    const auto n = m.rows();
    RVector v(n * (n + 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = c; r < n; ++r)
            v(k++) = (r == c) ? m(r, c) : kSqrt2 * m(r, c);
    return v;
}

RMatrix smat(const RVector &v, int side)
{
    require(v.size() == svec_size(side), "smat: size mismatch");
    RMatrix m(side, side);
    Eigen::Index k = 0;
    for (int c = 0; c < side; ++c)
        for (int r = c; r < side; ++r)
        {
            const double val = (r == c) ? v(k) : v(k) / kSqrt2;
            m(r, c) = val;
            m(c, r) = val;
            ++k;
        }
    return m;
}

namespace
{

/// Hermitian matrix whose real embedding is m, when m has that structure.
bool embedded_hermitian(const RMatrix &m, CMatrix &h)
{
    if (m.rows() % 2 != 0)
        return false;
    const auto n = m.rows() / 2;
    const auto a = m.topLeftCorner(n, n);
    const auto d = m.bottomRightCorner(n, n);
    const auto b = m.bottomLeftCorner(n, n);
    const auto c = m.topRightCorner(n, n);
    const double tol = 1e-13 * std::max(1e-300, m.cwiseAbs().maxCoeff());
    if ((a - d).cwiseAbs().maxCoeff() > tol || (b + c).cwiseAbs().maxCoeff() > tol)
        return false;
    h.resize(n, n);
    h.real() = 0.5 * (a + d);
    h.imag() = 0.5 * (b - c);
    return true;
}

void project_psd_block(Eigen::Ref<RVector> block, int side)
{
    const RMatrix m = smat(block, side);
    CMatrix h;
    if (embedded_hermitian(m, h))
    {
        // half-size complex eigenproblem, same projection
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        if (es.eigenvalues().minCoeff() >= 0.0)
            return;
        const RVector lam = es.eigenvalues().cwiseMax(0.0);
        const CMatrix p = es.eigenvectors() * lam.cast<cdouble>().asDiagonal() * es.eigenvectors().adjoint();
        block = svec(hermitian_embed(p));
        return;
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m);
    if (es.eigenvalues().minCoeff() >= 0.0)
        return;
    const RVector lam = es.eigenvalues().cwiseMax(0.0);
    block = svec(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
}

void project_impl(Eigen::Ref<RVector> v, const ConeSpec &cones, bool dual)
{
    require(v.size() == cones.rows(), "project_cone: size mismatch");
    Eigen::Index off = 0;
    if (!dual)
        v.segment(0, cones.zero).setZero();
    off += cones.zero;
    for (int i = 0; i < cones.nonneg; ++i, ++off)
        v(off) = std::max(0.0, v(off));
    for (int d : cones.soc)
    {
        v.segment(off, d) = project_soc(v.segment(off, d));
        off += d;
    }
    for (int s : cones.psd)
    {
        const auto len = svec_size(s);
        project_psd_block(v.segment(off, len), s);
        off += len;
    }
}

} // namespace

void project_cone(Eigen::Ref<RVector> v, const ConeSpec &cones)
{
    project_impl(v, cones, false);
}

void project_dual_cone(Eigen::Ref<RVector> v, const ConeSpec &cones)
{
    project_impl(v, cones, true);
}

RMatrix hermitian_embed(const CMatrix &h)
{
    require(h.rows() == h.cols(), "hermitian_embed: matrix must be square");
    const auto n = h.rows();
    RMatrix y(2 * n, 2 * n);
    y.topLeftCorner(n, n) = h.real();
    y.bottomRightCorner(n, n) = h.real();
    y.bottomLeftCorner(n, n) = h.imag();
    y.topRightCorner(n, n) = -h.imag();
    return y;
}

CMatrix hermitian_extract(const RMatrix &y)
{
    require(y.rows() == y.cols() && y.rows() % 2 == 0, "hermitian_extract: need a square 2n x 2n matrix");
    const auto n = y.rows() / 2;
    const RMatrix re = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
    const RMatrix im = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
    CMatrix h(n, n);
    h.real() = re;
    h.imag() = im;
    return h;
}

HermitianLayout::HermitianLayout(int side) : side_(side)
{
    require(side >= 1, "HermitianLayout: side must be >= 1");
    const Eigen::Index n = side;
    const Eigen::Index big = 2 * n;
    for (Eigen::Index c = 0; c < big; ++c)
        for (Eigen::Index r = c; r < big; ++r)
        {
            const Eigen::Index row = svec_index(r, c, big);
            const double off = (r == c) ? 1.0 : kSqrt2;
            if (c >= n || r < n)
            {
                const int i = static_cast<int>(r >= n ? r - n : r);
                const int j = static_cast<int>(c >= n ? c - n : c);
                if (i == j)
                    embed_.push_back({row, diag(i), off});
                else
                    embed_.push_back({row, re(i, j), off});
            }
            else
            {
                const int i = static_cast<int>(r - n);
                const int j = static_cast<int>(c);
                if (i > j)
                    embed_.push_back({row, im(i, j), off});
                else if (i < j)
                    embed_.push_back({row, im(j, i), -off});
            }
        }
}

Eigen::Index HermitianLayout::diag(int i) const
{
    return i;
}

Eigen::Index HermitianLayout::re(int i, int j) const
{
    const Eigen::Index n = side_;
    const Eigen::Index k = static_cast<Eigen::Index>(j) * n - static_cast<Eigen::Index>(j) * (j + 1) / 2 + (i - j - 1);
    return n + 2 * k;
}

Eigen::Index HermitianLayout::im(int i, int j) const
{
    return re(i, j) + 1;
}

RVector HermitianLayout::pack(const CMatrix &h) const
{
    require(h.rows() == side_ && h.cols() == side_, "HermitianLayout::pack: size mismatch");
    RVector p(size());
    for (int i = 0; i < side_; ++i)
        p(diag(i)) = h(i, i).real();
    for (int j = 0; j < side_; ++j)
        for (int i = j + 1; i < side_; ++i)
        {
            const cdouble v = 0.5 * (h(i, j) + std::conj(h(j, i)));
            p(re(i, j)) = v.real();
            p(im(i, j)) = v.imag();
        }
    return p;
}

CMatrix HermitianLayout::unpack(const Eigen::Ref<const RVector> &p) const
{
    require(p.size() == size(), "HermitianLayout::unpack: size mismatch");
    CMatrix h(side_, side_);
    for (int i = 0; i < side_; ++i)
        h(i, i) = p(diag(i));
    for (int j = 0; j < side_; ++j)
        for (int i = j + 1; i < side_; ++i)
        {
            h(i, j) = {p(re(i, j)), p(im(i, j))};
            h(j, i) = std::conj(h(i, j));
        }
    return h;
}

RVector HermitianLayout::trace_functional(const CMatrix &c) const
{
    require(c.rows() == side_ && c.cols() == side_, "HermitianLayout::trace_functional: size mismatch");
    RVector w(size());
    for (int i = 0; i < side_; ++i)
        w(diag(i)) = c(i, i).real();
    for (int j = 0; j < side_; ++j)
        for (int i = j + 1; i < side_; ++i)
        {
            // C_ji H_ij + C_ij H_ji = 2 Re(C_ji H_ij) for Hermitian C
            const cdouble cji = 0.5 * (c(j, i) + std::conj(c(i, j)));
            w(re(i, j)) = 2.0 * cji.real();
            w(im(i, j)) = -2.0 * cji.imag();
        }
    return w;
}

ConicProblem build_dual(const ConicProblem &primal)
{
    primal.validate();
    const auto n = primal.n();
    const auto m = primal.m();
    const auto free_rows = primal.cones.zero;
    const auto cone_rows = m - free_rows;

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(primal.A.nonZeros() + cone_rows));
    for (int k = 0; k < primal.A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(primal.A, k); it; ++it)
            trip.emplace_back(it.col(), it.row(), it.value());
    for (Eigen::Index i = 0; i < cone_rows; ++i)
        trip.emplace_back(n + i, free_rows + i, -1.0);

    ConicProblem d;
    d.A.resize(n + cone_rows, m);
    d.A.setFromTriplets(trip.begin(), trip.end());
    d.b = RVector::Zero(n + cone_rows);
    d.b.head(n) = -primal.c;
    d.c = primal.b;
    d.cones.zero = static_cast<int>(n);
    d.cones.nonneg = primal.cones.nonneg;
    d.cones.soc = primal.cones.soc;
    d.cones.psd = primal.cones.psd;
    return d;
}

void write_problem_text(std::ostream &os, const ConicProblem &p)
{
    p.validate();
    os << "quantbeam-conic 1\n";
    os << "n " << p.n() << " m " << p.m() << '\n';
    os << "zero " << p.cones.zero << '\n';
    os << "nonneg " << p.cones.nonneg << '\n';
    os << "soc " << p.cones.soc.size();
    for (int d : p.cones.soc)
        os << ' ' << d;
    os << "\npsd " << p.cones.psd.size();
    for (int s : p.cones.psd)
        os << ' ' << s;
    os << '\n' << std::setprecision(17);
    os << "c\n";
    for (Eigen::Index j = 0; j < p.n(); ++j)
        os << p.c(j) << (j + 1 < p.n() ? ' ' : '\n');
    os << "b\n";
    for (Eigen::Index i = 0; i < p.m(); ++i)
        os << p.b(i) << (i + 1 < p.m() ? ' ' : '\n');
    os << "A\n";
    const RMatrix dense(p.A);
    for (Eigen::Index i = 0; i < p.m(); ++i)
        for (Eigen::Index j = 0; j < p.n(); ++j)
            os << dense(i, j) << (j + 1 < p.n() ? ' ' : '\n');
}

ConicProblem read_problem_text(std::istream &is)
{
    auto expect = [&](const std::string &word) {
        std::string tok;
        if (!(is >> tok) || tok != word)
            throw std::invalid_argument("read_problem_text: expected '" + word + "', got '" + tok + "'");
    };
    expect("quantbeam-conic");
    int version = 0;
    is >> version;
    require(version == 1, "read_problem_text: unsupported version");
    Eigen::Index n = 0, m = 0;
    expect("n");
    is >> n;
    expect("m");
    is >> m;
    ConicProblem p;
    expect("zero");
    is >> p.cones.zero;
    expect("nonneg");
    is >> p.cones.nonneg;
    std::size_t count = 0;
    expect("soc");
    is >> count;
    p.cones.soc.resize(count);
    for (auto &d : p.cones.soc)
        is >> d;
    expect("psd");
    is >> count;
    p.cones.psd.resize(count);
    for (auto &s : p.cones.psd)
        is >> s;
    p.c.resize(n);
    p.b.resize(m);
    expect("c");
    for (Eigen::Index j = 0; j < n; ++j)
        is >> p.c(j);
    expect("b");
    for (Eigen::Index i = 0; i < m; ++i)
        is >> p.b(i);
    expect("A");
    RMatrix dense(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            is >> dense(i, j);
    if (!is)
        throw std::invalid_argument("read_problem_text: truncated input");
    p.A = dense.sparseView();
    p.validate();
    return p;
}

} // namespace quantbeam::conic
