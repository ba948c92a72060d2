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

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace quantbeam
{

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Thrown when a computation hits a numerical breakdown (failed factorization,
/// indefinite matrix where a PSD one was required, ...).
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string &what)
{
    if (!cond)
        throw std::invalid_argument(what);
}

inline CMatrix hermitian_part(const CMatrix &m)
{
    return 0.5 * (m + m.adjoint());
}

/// diag(M) as a matrix, i.e. M with its off-diagonal entries zeroed.
inline CMatrix diag_part(const CMatrix &m)
{
    CMatrix d = CMatrix::Zero(m.rows(), m.cols());
    d.diagonal() = m.diagonal();
    return d;
}

inline RVector real_diagonal(const CMatrix &m)
{
    return m.diagonal().real();
}

inline double min_eigenvalue(const CMatrix &m)
{
    if (m.size() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const CMatrix &m)
{
    if (m.size() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

inline double relative_difference(double a, double b)
{
    return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)});
}

/// Numerical rank from the singular values, relative to the largest one.
inline int numerical_rank(const CMatrix &m, double tol)
{
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto &sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * sv(0))
            ++r;
    return r;
}

} // namespace quantbeam
