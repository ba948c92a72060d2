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

// Small dense-ish conic programs
//
//     minimize    c'x
//     subject to  A x + s = b,   s in K
//
// with K an ordered product of the zero cone, the nonnegative orthant,
// second-order cones {(t, x) : |x| <= t} and PSD cones. PSD blocks are stored
// as svec: lower triangle, column-major, off-diagonals multiplied by sqrt(2),
// so that svec(X)'svec(Y) = Tr(XY).
//
// The dual is   maximize -b'y  subject to  A'y + c = 0,  y in K*.

#include "quantbeam/linalg.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace quantbeam::conic
{

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct ConeSpec
{
    int zero = 0;
    int nonneg = 0;
    std::vector<int> soc; ///< dimensions, each >= 1
    std::vector<int> psd; ///< matrix side lengths, each >= 1

    [[nodiscard]] Eigen::Index rows() const;
};

inline Eigen::Index svec_size(int side) { return static_cast<Eigen::Index>(side) * (side + 1) / 2; }

struct ConicProblem
{
    RVector c;
    SparseMatrix A;
    RVector b;
    ConeSpec cones;

    [[nodiscard]] Eigen::Index n() const { return c.size(); }
    [[nodiscard]] Eigen::Index m() const { return b.size(); }

    /// Throws std::invalid_argument when dimensions and cone sizes disagree.
    void validate() const;
};

enum class ConicStatus
{
    Optimal,
    Infeasible, ///< primal infeasible (certificate in y)
    Unbounded,  ///< dual infeasible (certificate in x)
    MaxIters,
};

std::string to_string(ConicStatus s);

struct ConicSolution
{
    RVector x, y, s;
    ConicStatus status = ConicStatus::MaxIters;
    double primal_residual = 0.0; ///< |Ax + s - b| / (1 + |b|)
    double dual_residual = 0.0;   ///< |A'y + c| / (1 + |c|)
    double gap = 0.0;             ///< |c'x + b'y| / (1 + |c'x| + |b'y|)
    double objective = 0.0;       ///< c'x
    double dual_objective = 0.0;  ///< -b'y
    int iterations = 0;
    int factorizations = 0;
    double solve_time = 0.0; ///< seconds

    [[nodiscard]] bool optimal() const { return status == ConicStatus::Optimal; }
};

/// Snapshot passed to ConicSettings::on_iteration at every convergence check.
struct IterationLog
{
    int iteration;
    double primal_objective;
    double dual_objective;
    double primal_residual;
    double dual_residual;
    double rho;
};

struct ConicSettings
{
    double eps_abs = 1e-8;
    double eps_rel = 1e-8;
    double eps_infeasible = 1e-7;
    int max_iters = 200000;
    double alpha = 1.6; ///< over-relaxation
    double rho = 0.1;
    double sigma = 1e-6;
    bool adaptive_rho = true;
    double adaptive_rho_tolerance = 5.0;
    int check_interval = 10;
    int equilibration_iters = 25;
    double time_limit = 0.0; ///< seconds, 0 = none

    /// Optional initial point (unscaled); any of them may be empty.
    RVector x0, y0, s0;

    std::function<void(const IterationLog &)> on_iteration;
};

/// Pluggable conic engine.
class ConicSolver
{
public:
    virtual ~ConicSolver() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual ConicSolution solve(const ConicProblem &problem,
                                              const ConicSettings &settings) const = 0;
};

/// Operator-splitting reference engine.
class AdmmSolver final : public ConicSolver
{
public:
    [[nodiscard]] std::string name() const override { return "admm"; }
    [[nodiscard]] ConicSolution solve(const ConicProblem &problem,
                                      const ConicSettings &settings) const override;
};

/// Log-barrier path following with dense Newton steps. It forms A' H A
/// explicitly, so it suits programs with few variables (the SDR dual has
/// K + 1). Zero-cone rows are kept as equality constraints of the Newton
/// systems; a phase-I program finds the first interior point. Honors eps_abs,
/// eps_rel, eps_infeasible, max_iters (Newton steps), time_limit, x0 and
/// on_iteration (once per barrier parameter).
class BarrierSolver final : public ConicSolver
{
public:
    [[nodiscard]] std::string name() const override { return "barrier"; }
    [[nodiscard]] ConicSolution solve(const ConicProblem &problem,
                                      const ConicSettings &settings) const override;
};

/// Shared AdmmSolver instance.
std::shared_ptr<const ConicSolver> default_solver();

/// Shared BarrierSolver instance.
std::shared_ptr<const ConicSolver> barrier_solver();

/// Looks an engine up by name ("admm" or "barrier"); throws
/// std::invalid_argument for anything else.
std::shared_ptr<const ConicSolver> solver_by_name(const std::string &name);

// --- cone geometry -------------------------------------------------------

/// Euclidean projection onto {(t, x) : |x| <= t}; v = (t, x).
RVector project_soc(const RVector &v);

/// Nearest PSD matrix in Frobenius norm. Throws std::invalid_argument when M
/// is asymmetric by more than 1e-9 (relative to its largest entry, min 1).
RMatrix project_psd(const RMatrix &m);

RVector svec(const RMatrix &m);
RMatrix smat(const RVector &v, int side);

/// In-place projection of a stacked slack vector onto K.
void project_cone(Eigen::Ref<RVector> v, const ConeSpec &cones);

/// In-place projection onto the dual cone K* (zero-cone rows become free).
void project_dual_cone(Eigen::Ref<RVector> v, const ConeSpec &cones);

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian H.
RMatrix hermitian_embed(const CMatrix &h);

/// Inverse of hermitian_embed; averages the redundant blocks, so it is also
/// the adjoint-compatible compression of a general symmetric 2n x 2n matrix.
CMatrix hermitian_extract(const RMatrix &y);

// --- Hermitian variables -------------------------------------------------

/// Real parametrization of an n x n Hermitian matrix with n^2 entries: the
/// diagonal, then (Re, Im) of each strictly-lower entry, column by column.
class HermitianLayout
{
public:
    explicit HermitianLayout(int side);

    [[nodiscard]] int side() const { return side_; }
    [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(side_) * side_; }

    [[nodiscard]] Eigen::Index diag(int i) const;
    [[nodiscard]] Eigen::Index re(int i, int j) const; ///< i > j
    [[nodiscard]] Eigen::Index im(int i, int j) const; ///< i > j

    [[nodiscard]] RVector pack(const CMatrix &h) const;
    [[nodiscard]] CMatrix unpack(const Eigen::Ref<const RVector> &p) const;

    /// Coefficients w with Tr(C H) = w' pack(H) for Hermitian C.
    [[nodiscard]] RVector trace_functional(const CMatrix &c) const;

    /// Entries of svec(hermitian_embed(H)) as (svec row, param, coefficient).
    struct EmbedEntry
    {
        Eigen::Index row;
        Eigen::Index param;
        double coef;
    };
    [[nodiscard]] const std::vector<EmbedEntry> &embed_entries() const { return embed_; }

private:
    int side_;
    std::vector<EmbedEntry> embed_;
};

// --- problem tooling ------------------------------------------------------

/// Explicit dual, written in the same standard form:
///   minimize b'y  s.t.  [A'; -I] y + s = [-c; 0],  s in {0}^n x K*.
/// (Zero-cone rows of the primal have a free dual and get no cone row.)
ConicProblem build_dual(const ConicProblem &primal);

/// Text dump: cone sizes followed by dense c, b and A, for cross-checking
/// against external solvers.
void write_problem_text(std::ostream &os, const ConicProblem &problem);
ConicProblem read_problem_text(std::istream &is);

} // namespace quantbeam::conic
