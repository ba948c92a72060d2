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

#include <cmath>

namespace quantbeam
{

namespace
{

/// h^H A_t M A_t^H h for Hermitian M.
double quad(const CVector &ath, const CMatrix &m)
{
    return (ath.adjoint() * m * ath).value().real();
}

void check_cov(const CMatrix &r, Eigen::Index n, const char *what)
{
    if (r.rows() != n || r.cols() != n)
        throw std::invalid_argument(std::string(what) + ": covariance has the wrong size");
}

Eigen::LLT<CMatrix> factor_q(const CMatrix &q)
{
    Eigen::LLT<CMatrix> llt(hermitian_part(q));
    if (llt.info() != Eigen::Success)
        throw NumericalError("radar: Q is not positive definite");
    return llt;
}

/// L^-1 S L^-H for Q = L L^H.
CMatrix whitened(const RadarCovariances &rc, const Eigen::LLT<CMatrix> &llt)
{
    const auto l = llt.matrixL();
    CMatrix t = l.solve(rc.S);
    CMatrix c = l.solve(t.adjoint()).adjoint();
    return hermitian_part(c);
}

} // namespace

CMatrix BeamformingSolution::V() const
{
    CMatrix v(W_c.rows(), W_c.cols() + W_r.cols());
    v << W_c, W_r;
    return v;
}

CMatrix covariance_rx(const CMatrix &W_c, const CMatrix &W_r)
{
    require(W_c.rows() == W_r.rows(), "covariance_rx: W_c and W_r need the same row count");
    return W_r * W_r.adjoint() + W_c * W_c.adjoint();
}

double transmit_power(const RVector &alpha_t, const CMatrix &R_x)
{
    check_cov(R_x, alpha_t.size(), "transmit_power");
    return alpha_t.dot(real_diagonal(R_x));
}

double transmit_power_trace_form(const RVector &alpha_t, const CMatrix &R_x)
{
    check_cov(R_x, alpha_t.size(), "transmit_power");
    const CMatrix at = alpha_t.cast<cdouble>().asDiagonal();
    const CMatrix m = at * R_x * at.adjoint() + dac_noise_cov(alpha_t, R_x);
    return m.trace().real();
}

double sqinr(int k, const CMatrix &W_c, const CMatrix &W_r, const CVector &h,
             const QuantizationProfile &profile, double sigma_k2)
{
    require(k >= 0 && k < W_c.cols(), "sqinr: user index out of range");
    require(sigma_k2 > 0.0, "sqinr: noise power must be positive");
    const double ak = profile.alpha_user(k);
    const CMatrix r_x = covariance_rx(W_c, W_r);
    const CVector ath = profile.alpha_t.cast<cdouble>().cwiseProduct(h);
    const CVector w = W_c.col(k);
    const double useful = std::norm(ath.dot(w));
    const double r_qt = quad(h, dac_noise_cov(profile.alpha_t, r_x));
    const double denom = quad(ath, r_x) - ak * useful + r_qt + sigma_k2;
    return ak * useful / denom;
}

double sqinr_first_form(int k, const CMatrix &W_c, const CMatrix &W_r, const CVector &h,
                        const QuantizationProfile &profile, double sigma_k2)
{
    require(k >= 0 && k < W_c.cols(), "sqinr: user index out of range");
    require(sigma_k2 > 0.0, "sqinr: noise power must be positive");
    const double ak = profile.alpha_user(k);
    const CMatrix r_x = covariance_rx(W_c, W_r);
    const CVector ath = profile.alpha_t.cast<cdouble>().cwiseProduct(h);
    const CVector w = W_c.col(k);
    const double useful = std::norm(ath.dot(w));
    CMatrix others = W_r * W_r.adjoint() + W_c * W_c.adjoint() - w * w.adjoint();
    const double r_qt = quad(h, dac_noise_cov(profile.alpha_t, r_x));
    const double r_k = quad(ath, r_x) + r_qt + sigma_k2;
    const double r_qk = ak * (1.0 - ak) * r_k;
    const double denom = ak * ak * (quad(ath, others) + r_qt + sigma_k2) + r_qk;
    return ak * ak * useful / denom;
}

RVector sqinr_all(const CMatrix &W_c, const CMatrix &W_r, const ChannelSet &channels,
                  const QuantizationProfile &profile, double sigma_k2)
{
    RVector g(channels.n_users());
    for (int k = 0; k < channels.n_users(); ++k)
        g(k) = sqinr(k, W_c, W_r, channels.user(k), profile, sigma_k2);
    return g;
}

RadarCovariances radar_covariances(const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                                   double sigma_r2)
{
    require(G.rows() == profile.alpha_r.size() && G.cols() == profile.alpha_t.size(),
            "radar_covariances: G does not match the quantization profile");
    check_cov(R_x, G.cols(), "radar_covariances");
    const auto n_r = G.rows();
    const CMatrix at = profile.gain_tx();
    const CMatrix ar = profile.gain_rx();
    RadarCovariances rc;
    rc.R_qt = dac_noise_cov(profile.alpha_t, R_x);
    const CMatrix gat = G * at;
    rc.R_ybs = gat * R_x * gat.adjoint() + G * rc.R_qt * G.adjoint() +
               sigma_r2 * CMatrix::Identity(n_r, n_r);
    rc.R_ybs = hermitian_part(rc.R_ybs);
    rc.R_qr = bs_adc_noise_cov(profile.alpha_r, rc.R_ybs);
    rc.Q = hermitian_part(ar * G * rc.R_qt * G.adjoint() * ar.adjoint() + sigma_r2 * ar * ar.adjoint() + rc.R_qr);
    const CMatrix argat = ar * gat;
    rc.S = hermitian_part(argat * R_x * argat.adjoint());
    return rc;
}

double radar_sqnr_max(const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                      double sigma_r2)
{
    require(sigma_r2 > 0.0, "radar_sqnr_max: sigma_r2 must be positive");
    const RadarCovariances rc = radar_covariances(G, profile, R_x, sigma_r2);
    const auto llt = factor_q(rc.Q);
    return whitened(rc, llt).trace().real();
}

double radar_sqnr_lambda_max(const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                             double sigma_r2)
{
    require(sigma_r2 > 0.0, "radar_sqnr_lambda_max: sigma_r2 must be positive");
    const RadarCovariances rc = radar_covariances(G, profile, R_x, sigma_r2);
    const auto llt = factor_q(rc.Q);
    return std::max(0.0, max_eigenvalue(whitened(rc, llt)));
}

CVector receive_beamformer(const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                           double sigma_r2)
{
    require(sigma_r2 > 0.0, "receive_beamformer: sigma_r2 must be positive");
    const RadarCovariances rc = radar_covariances(G, profile, R_x, sigma_r2);
    const auto llt = factor_q(rc.Q);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(whitened(rc, llt));
    const CVector v = es.eigenvectors().col(es.eigenvalues().size() - 1);
    CVector u = llt.matrixU().solve(v);
    return u / u.norm();
}

double radar_sqnr(const CVector &u, const CMatrix &G, const QuantizationProfile &profile, const CMatrix &R_x,
                  double sigma_r2)
{
    const RadarCovariances rc = radar_covariances(G, profile, R_x, sigma_r2);
    require(u.size() == rc.Q.rows(), "radar_sqnr: receive beamformer has the wrong length");
    const double den = (u.adjoint() * rc.Q * u).value().real();
    require(den > 0.0, "radar_sqnr: zero receive beamformer");
    return (u.adjoint() * rc.S * u).value().real() / den;
}

namespace
{

struct PointTerms
{
    double eta2, zeta, eps;
    RVector b_diag; ///< diagonal of B
};

PointTerms point_terms(const CMatrix &R_x, const PointModel &m)
{
    require(m.alpha_t > 0.0 && m.alpha_t <= 1.0, "point model: alpha_t must lie in (0, 1]");
    require(m.sigma_r2 > 0.0 && m.power_w > 0.0, "point model: powers must be positive");
    const double tr = R_x.trace().real();
    if (std::abs(m.alpha_t * tr - m.power_w) > 1e-6 * m.power_w)
        throw std::invalid_argument("point model: closed form requires alpha_t Tr(R_x) = P");
    const CVector a = steering_tx(m.theta, static_cast<int>(R_x.rows()));
    PointTerms t;
    t.eta2 = std::norm(m.eta);
    t.zeta = m.alpha_t * m.alpha_t * (a.adjoint() * R_x * a).value().real();
    t.eps = (1.0 - m.alpha_t) * m.power_w;
    t.b_diag = (t.eta2 * (t.zeta + t.eps)) * (RVector::Ones(m.alpha_r.size()) - m.alpha_r).array() + m.sigma_r2;
    return t;
}

} // namespace

CMatrix closed_form_q_inverse(const CMatrix &R_x, const PointModel &model)
{
    const PointTerms t = point_terms(R_x, model);
    const CVector b = steering_rx(model.theta, static_cast<int>(model.alpha_r.size()));
    const CVector binv_b = b.cwiseQuotient(t.b_diag.cast<cdouble>());
    const CVector ar_b = model.alpha_r.cast<cdouble>().cwiseProduct(b);
    const CVector binv_ar_b = ar_b.cwiseQuotient(t.b_diag.cast<cdouble>()); // B^-1 A_r b (B, A_r real diagonal)
    const double mu = t.eta2 * t.eps;
    const double denom = 1.0 + mu * ar_b.dot(binv_b).real();
    CMatrix m = -(mu / denom) * binv_b * binv_ar_b.adjoint();
    m.diagonal() += t.b_diag.cwiseInverse().cast<cdouble>();
    return m * model.alpha_r.cwiseInverse().cast<cdouble>().asDiagonal();
}

double point_objective_closed_form(const CMatrix &R_x, const PointModel &model)
{
    const PointTerms t = point_terms(R_x, model);
    if (t.zeta == 0.0)
        return 0.0;
    const double c = model.alpha_r.cwiseQuotient(t.b_diag).sum();
    return t.eta2 * t.zeta / (1.0 / c + t.eta2 * t.eps);
}

double PowerModel::dac_power(int bits) const
{
    return c_dac * std::ldexp(1.0, bits);
}

double PowerModel::adc_power(int bits) const
{
    return c_adc * std::ldexp(1.0, bits);
}

void PowerModel::validate() const
{
    require(p_lo > 0.0 && p_rf > 0.0 && c_dac > 0.0 && c_adc > 0.0, "power model: every term must be positive");
    require(kappa > 0.0 && kappa <= 1.0, "power model: kappa must lie in (0, 1]");
}

namespace
{

int finite_bits(const BitDepth &b)
{
    require(!b.is_infinite(), "power model: converter power is undefined for infinite resolution");
    return b.bits();
}

} // namespace

double bs_power(const SystemConfig &config, const PowerModel &pm)
{
    pm.validate();
    double p = pm.p_lo + config.power_w / pm.kappa;
    for (const auto &b : config.bits.dac_bits)
        p += pm.p_rf + 2.0 * pm.dac_power(finite_bits(b));
    for (const auto &b : config.bits.adc_bits_bs)
        p += pm.p_rf + 2.0 * pm.adc_power(finite_bits(b));
    return p;
}

double users_power(const SystemConfig &config, const PowerModel &pm)
{
    pm.validate();
    double p = 0.0;
    for (const auto &b : config.bits.adc_bits_user)
        p += pm.p_lo + pm.p_rf + 2.0 * pm.adc_power(finite_bits(b));
    return p;
}

double energy_efficiency(const RVector &gammas, double gamma_r, const SystemConfig &config,
                         const PowerModel &pm)
{
    require(gamma_r >= 0.0 && (gammas.array() >= 0.0).all(), "energy_efficiency: SQINR values must be nonnegative");
    const double denom = bs_power(config, pm) + users_power(config, pm);
    require(denom > 0.0, "energy_efficiency: total power must be positive");
    double rate = std::log2(1.0 + gamma_r);
    for (Eigen::Index k = 0; k < gammas.size(); ++k)
        rate += std::log2(1.0 + gammas(k));
    return rate / denom;
}

void evaluate_solution(BeamformingSolution &sol, const Scenario &sc)
{
    sol.R_x = covariance_rx(sol.W_c, sol.W_r);
    sol.sqinr_per_user = sqinr_all(sol.W_c, sol.W_r, sc.channels, sc.profile, sc.config.sigma_k2);
    sol.radar_sqnr = radar_sqnr_max(sc.channels.G, sc.profile, sol.R_x, sc.config.sigma_r2);
    sol.radar_sqnr_lambda_max = radar_sqnr_lambda_max(sc.channels.G, sc.profile, sol.R_x, sc.config.sigma_r2);
    sol.objective_value = sol.radar_sqnr;
}

} // namespace quantbeam
