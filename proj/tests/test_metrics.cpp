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

#include "quantbeam/metrics.hpp"
#include "quantbeam/units.hpp"

#include <doctest.h>

#include <cmath>

using namespace quantbeam;

namespace
{

CMatrix random_psd(int n, RngStream &rng)
{
    const CMatrix w = rng.complex_normal(n, n);
    return w * w.adjoint();
}

QuantizationProfile random_profile(int n_tx, int n_rx, int k, RngStream &rng)
{
    QuantizationProfile p;
    p.alpha_t = (0.6 + 0.4 * RVector::NullaryExpr(n_tx, [&] { return rng.uniform(); }).array()).matrix();
    p.alpha_r = (0.6 + 0.4 * RVector::NullaryExpr(n_rx, [&] { return rng.uniform(); }).array()).matrix();
    p.alpha_user = (0.6 + 0.4 * RVector::NullaryExpr(k, [&] { return rng.uniform(); }).array()).matrix();
    return p;
}

/// Largest eigenvalue of the pencil (S, Q) from a general eigensolver.
double pencil_max(const CMatrix &s, const CMatrix &q)
{
    Eigen::ComplexEigenSolver<CMatrix> es(q.inverse() * s);
    return es.eigenvalues().real().maxCoeff();
}

} // namespace

TEST_CASE("transmit covariance and power")
{
    RngStream rng(1, 0, StreamTag::Probe);
    CHECK((covariance_rx(CMatrix::Zero(3, 2), CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm() == 0.0);
    const CVector w = rng.complex_normal(3, 1);
    CHECK((covariance_rx(w, CMatrix::Zero(3, 3)) - w * w.adjoint()).norm() < 1e-15);
    const CMatrix r = covariance_rx(rng.complex_normal(5, 2), rng.complex_normal(5, 5));
    CHECK(min_eigenvalue(r) >= -1e-12);

    CHECK(transmit_power(RVector::Ones(5), r) == doctest::Approx(r.trace().real()).epsilon(1e-14));
    CHECK(transmit_power(RVector::Constant(5, 0.9), r) == doctest::Approx(0.9 * r.trace().real()).epsilon(1e-14));
    for (int i = 0; i < 20; ++i)
    {
        const auto p = random_profile(5, 1, 0, rng);
        const CMatrix rx = random_psd(5, rng);
        CHECK(relative_difference(transmit_power(p.alpha_t, rx), transmit_power_trace_form(p.alpha_t, rx)) < 1e-12);
    }
}

TEST_CASE("sqinr: closed forms")
{
    RngStream rng(2, 0, StreamTag::Probe);
    // unquantized single user with MRT
    const CVector h = rng.complex_normal(4, 1);
    const double p = 2.0, s2 = 0.5;
    const CMatrix w = std::sqrt(p) * h / h.norm();
    const auto ideal = QuantizationProfile::ideal(4, 1, 1);
    CHECK(sqinr(0, w, CMatrix::Zero(4, 4), h, ideal, s2) ==
          doctest::Approx(h.squaredNorm() * p / s2).epsilon(1e-12));
    CHECK(sqinr(0, CMatrix::Zero(4, 1), CMatrix::Zero(4, 4), h, ideal, s2) == 0.0);

    // both algebraic forms agree
    for (int i = 0; i < 50; ++i)
    {
        const auto prof = random_profile(6, 1, 3, rng);
        const CMatrix wc = rng.complex_normal(6, 3);
        const CMatrix wr = rng.complex_normal(6, 6);
        const CVector hk = rng.complex_normal(6, 1);
        for (int k = 0; k < 3; ++k)
            CHECK(relative_difference(sqinr(k, wc, wr, hk, prof, 0.3), sqinr_first_form(k, wc, wr, hk, prof, 0.3)) <
                  1e-10);
    }
}

TEST_CASE("sqinr agrees with an AQNM signal simulation")
{
    RngStream rng(3, 0, StreamTag::Probe);
    const int n = 6, users = 2;
    auto prof = build_profile(BitAllocation::uniform(n, 1, users, BitDepth::finite(3)));
    const CMatrix wc = 0.5 * rng.complex_normal(n, users);
    const CMatrix wr = 0.2 * rng.complex_normal(n, n);
    const CMatrix h = rng.complex_normal(users, n);
    const double s2 = 0.1;
    const CMatrix rx = covariance_rx(wc, wr);
    const CMatrix rqt = dac_noise_cov(prof.alpha_t, rx);

    for (int k = 0; k < users; ++k)
    {
        const CVector hk = h.row(k).adjoint();
        const double ak = prof.alpha_user(k);
        const double ryk = (hk.adjoint() * (prof.gain_tx() * rx * prof.gain_tx() + rqt) * hk).value().real() + s2;
        const int draws = 200000;
        cdouble corr = 0.0;
        double power = 0.0;
        for (int i = 0; i < draws; ++i)
        {
            const CVector sc = rng.complex_normal(users, 1);
            const CVector sr = rng.complex_normal(n, 1);
            const CVector x = wc * sc + wr * sr;
            const CVector xq = prof.alpha_t.cast<cdouble>().cwiseProduct(x) + sample_diagonal_noise(rqt, rng);
            const cdouble y = hk.dot(xq) + rng.complex_normal(s2);
            const cdouble yq = ak * y + rng.complex_normal(ak * (1.0 - ak) * ryk);
            corr += yq * std::conj(sc(k));
            power += std::norm(yq);
        }
        corr /= draws;
        power /= draws;
        const double mc = std::norm(corr) / (power - std::norm(corr));
        const double model = sqinr(k, wc, wr, hk, prof, s2);
        CHECK(std::abs(units::linear_to_db(mc) - units::linear_to_db(model)) < 1.0);
    }
}

TEST_CASE("radar covariances")
{
    RngStream rng(4, 0, StreamTag::Probe);
    const CMatrix g = rng.complex_normal(5, 4);
    const CMatrix rx = random_psd(4, rng);
    const auto rc = radar_covariances(g, QuantizationProfile::ideal(4, 5, 0), rx, 0.7);
    CHECK((rc.Q - 0.7 * CMatrix::Identity(5, 5)).norm() < 1e-14);
    CHECK(radar_sqnr_max(g, QuantizationProfile::ideal(4, 5, 0), rx, 0.7) ==
          doctest::Approx((g * rx * g.adjoint()).trace().real() / 0.7).epsilon(1e-10));
    CHECK(radar_sqnr_max(g, QuantizationProfile::ideal(4, 5, 0), CMatrix::Zero(4, 4), 0.7) == 0.0);

    for (int i = 0; i < 20; ++i)
    {
        const auto prof = random_profile(4, 5, 0, rng);
        const auto r = radar_covariances(g, prof, random_psd(4, rng), 0.1);
        CHECK(Eigen::LLT<CMatrix>(r.Q).info() == Eigen::Success);
    }
    CHECK_THROWS_AS(radar_sqnr_max(g, QuantizationProfile::ideal(4, 5, 0), rx, 0.0), std::invalid_argument);
}

TEST_CASE("BS receive covariance matches a simulated snapshot stream")
{
    RngStream rng(5, 0, StreamTag::Probe);
    const int nt = 4, nr = 3;
    const auto prof = build_profile(BitAllocation::uniform(nt, nr, 0, BitDepth::finite(3)));
    const CMatrix g = rng.complex_normal(nr, nt);
    const CMatrix wr = 0.5 * rng.complex_normal(nt, nt);
    const CMatrix rx = covariance_rx(CMatrix::Zero(nt, 0), wr);
    const double s2 = 0.2;
    const auto rc = radar_covariances(g, prof, rx, s2);
    const int draws = 200000;
    CMatrix acc = CMatrix::Zero(nr, nr);
    for (int i = 0; i < draws; ++i)
    {
        const CVector x = wr * rng.complex_normal(nt, 1);
        const CVector xq = prof.alpha_t.cast<cdouble>().cwiseProduct(x) + sample_diagonal_noise(rc.R_qt, rng);
        const CVector y = g * xq + rng.complex_normal(nr, 1, s2);
        acc += y * y.adjoint();
    }
    acc /= draws;
    CHECK((acc - rc.R_ybs).norm() <= 0.02 * rc.R_ybs.norm());
}

TEST_CASE("trace objective and generalized eigenvalues")
{
    RngStream rng(6, 0, StreamTag::Probe);
    const PointTarget pt{units::deg_to_rad(25.0), {0.3, 0.1}};
    const CMatrix g = make_trm(pt, 6, 5, rng);
    for (int i = 0; i < 10; ++i)
    {
        const auto prof = random_profile(5, 6, 0, rng);
        const CMatrix rx = random_psd(5, rng);
        const auto rc = radar_covariances(g, prof, rx, 0.4);
        const double trace = radar_sqnr_max(g, prof, rx, 0.4);
        CHECK(relative_difference(trace, pencil_max(rc.S, rc.Q)) < 1e-8);
        CHECK(relative_difference(trace, radar_sqnr_lambda_max(g, prof, rx, 0.4)) < 1e-8);
    }
}

TEST_CASE("receive beamformer")
{
    RngStream rng(7, 0, StreamTag::Probe);
    const PointTarget pt{units::deg_to_rad(40.0), {0.3, 0.0}};
    const CMatrix g = make_trm(pt, 6, 6, rng);
    const CMatrix rx = random_psd(6, rng);
    const auto ideal = QuantizationProfile::ideal(6, 6, 0);
    const CVector u = receive_beamformer(g, ideal, rx, 0.5);
    const CVector b = steering_rx(pt.theta, 6);
    CHECK(std::abs(b.dot(u)) == doctest::Approx(b.norm()).epsilon(1e-10));

    const CMatrix ge = rng.complex_normal(6, 6);
    const auto prof = random_profile(6, 6, 0, rng);
    const CVector ue = receive_beamformer(ge, prof, rx, 0.5);
    CHECK(ue.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const double best = radar_sqnr(ue, ge, prof, rx, 0.5);
    CHECK(relative_difference(best, radar_sqnr_lambda_max(ge, prof, rx, 0.5)) < 1e-8);
    for (int i = 0; i < 100; ++i)
        CHECK(radar_sqnr(rng.complex_normal(6, 1), ge, prof, rx, 0.5) <= best * (1.0 + 1e-12));
    const cdouble c(-2.0, 0.7);
    CHECK(relative_difference(radar_sqnr(c * ue, ge, prof, rx, 0.5), best) < 1e-12);
}

TEST_CASE("radar SQNR grows with transmit power when unquantized")
{
    RngStream rng(8, 0, StreamTag::Probe);
    const CMatrix g = rng.complex_normal(4, 4);
    const CMatrix rx = random_psd(4, rng);
    const auto ideal = QuantizationProfile::ideal(4, 4, 0);
    double last = 0.0;
    for (double s : {0.1, 0.5, 1.0, 2.0, 10.0})
    {
        const double v = radar_sqnr_max(g, ideal, s * rx, 0.3);
        CHECK(v >= last);
        last = v;
    }
}

TEST_CASE("closed-form inverse and point objective")
{
    RngStream rng(9, 0, StreamTag::Probe);
    const int nt = 8, nr = 6;
    double worst_inv = 0.0, worst_obj = 0.0;
    for (int i = 0; i < 100; ++i)
    {
        PointModel m;
        m.alpha_t = 0.6 + 0.4 * rng.uniform();
        m.eta = rng.complex_normal(0.5);
        m.theta = (rng.uniform() - 0.5) * 3.0;
        m.alpha_r = (0.6 + 0.4 * RVector::NullaryExpr(nr, [&] { return rng.uniform(); }).array()).matrix();
        m.sigma_r2 = 0.05 + rng.uniform();
        m.power_w = 0.1 + 2.0 * rng.uniform();
        CMatrix rx = random_psd(nt, rng);
        rx *= m.power_w / (m.alpha_t * rx.trace().real());

        QuantizationProfile prof{RVector::Constant(nt, m.alpha_t), m.alpha_r, RVector()};
        const CMatrix g = make_trm(PointTarget{m.theta, m.eta}, nr, nt, rng);
        const auto rc = radar_covariances(g, prof, rx, m.sigma_r2);
        const CMatrix direct = rc.Q.inverse();
        worst_inv = std::max(worst_inv, (closed_form_q_inverse(rx, m) - direct).norm() / direct.norm());
        worst_obj = std::max(worst_obj, relative_difference(point_objective_closed_form(rx, m),
                                                            (rc.S * direct).trace().real()));
    }
    CHECK(worst_inv <= 1e-10);
    CHECK(worst_obj <= 1e-9);

    PointModel m{0.9, {0.3, 0.0}, 0.2, RVector::Ones(4), 1.0, 1.0};
    CMatrix rx = CMatrix::Identity(4, 4);
    CHECK_THROWS_AS(point_objective_closed_form(rx, m), std::invalid_argument);
    // zeta = 0: R_x orthogonal to a(theta)
    const CVector a = steering_tx(m.theta, 4);
    CMatrix proj = CMatrix::Identity(4, 4) - a * a.adjoint() / a.squaredNorm();
    proj *= m.power_w / (m.alpha_t * proj.trace().real());
    CHECK(std::abs(point_objective_closed_form(proj, m)) < 1e-12);
}

TEST_CASE("energy efficiency")
{
    SystemConfig cfg = SystemConfig::defaults();
    PowerModel pm{0.02, 0.04, 1e-4, 2e-4, 0.3};
    CHECK(energy_efficiency(RVector::Zero(4), 0.0, cfg, pm) == 0.0);

    const RVector g = RVector::Constant(4, 3.0);
    const double ee = energy_efficiency(g, 10.0, cfg, pm);
    CHECK(ee > 0.0);
    PowerModel twice{2 * pm.p_lo, 2 * pm.p_rf, 2 * pm.c_dac, 2 * pm.c_adc, pm.kappa / 2};
    CHECK(energy_efficiency(g, 10.0, cfg, twice) == doctest::Approx(ee / 2.0).epsilon(1e-12));

    const double expect_bs = pm.p_lo + cfg.power_w / pm.kappa + 16 * (pm.p_rf + 2 * pm.c_dac * 8) +
                             16 * (pm.p_rf + 2 * pm.c_adc * 8);
    CHECK(bs_power(cfg, pm) == doctest::Approx(expect_bs).epsilon(1e-12));
    CHECK(users_power(cfg, pm) == doctest::Approx(4 * (pm.p_lo + pm.p_rf + 2 * pm.c_adc * 8)).epsilon(1e-12));

    CHECK_THROWS_AS(energy_efficiency(g, 1.0, cfg, PowerModel{0.0, 0.04, 1e-4, 2e-4, 0.3}), std::invalid_argument);
    SystemConfig inf = cfg;
    inf.bits = BitAllocation::ideal(16, 16, 4);
    CHECK_THROWS(energy_efficiency(g, 1.0, inf, pm));
}

TEST_CASE("evaluate_solution fills every metric")
{
    SystemConfig cfg = SystemConfig::defaults();
    cfg.n_tx = cfg.n_rx = 6;
    cfg.n_users = 2;
    cfg.gamma = RVector::Constant(2, 2.0);
    cfg.bits = BitAllocation::uniform(6, 6, 2, BitDepth::finite(3));
    const Scenario sc = make_scenario(cfg, draw_channels(default_point_target(), 2, 6, 6, 11));
    RngStream rng(11, 0, StreamTag::Probe);
    BeamformingSolution sol;
    sol.W_c = 0.1 * rng.complex_normal(6, 2);
    sol.W_r = 0.1 * rng.complex_normal(6, 6);
    evaluate_solution(sol, sc);
    CHECK((sol.R_x - covariance_rx(sol.W_c, sol.W_r)).norm() <= 1e-10 * sol.R_x.norm());
    CHECK(sol.sqinr_per_user.size() == 2);
    CHECK(sol.radar_sqnr == sol.objective_value);
    CHECK(sol.radar_sqnr_lambda_max <= sol.radar_sqnr * (1.0 + 1e-12));
    CHECK(sol.V().cols() == 8);
}
