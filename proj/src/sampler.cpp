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

#include "quantbeam/sim.hpp"

#include <cmath>

namespace quantbeam
{

std::string to_string(SamplerMode m)
{
    return m == SamplerMode::Aqnm ? "aqnm" : "midrise";
}

SamplerMode sampler_mode_from_string(const std::string &s)
{
    if (s == "aqnm")
        return SamplerMode::Aqnm;
    if (s == "midrise")
        return SamplerMode::Midrise;
    throw std::invalid_argument("unknown sampler mode '" + s + "' (expected aqnm or midrise)");
}

namespace
{

void converter_setup(const std::vector<BitDepth> &bits, const RVector &alpha, const RVector &power,
                     RVector &var, RVector &scale, std::vector<bool> &on, std::vector<int> &nbits)
{
    const auto n = static_cast<Eigen::Index>(bits.size());
    var.resize(n);
    scale.resize(n);
    on.assign(bits.size(), false);
    nbits.assign(bits.size(), 0);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto &b = bits[static_cast<std::size_t>(i)];
        const double p = std::max(0.0, power(i));
        var(i) = alpha(i) * (1.0 - alpha(i)) * p;
        // each real component carries half the chain power
        scale(i) = std::sqrt(p / 2.0);
        on[static_cast<std::size_t>(i)] = !b.is_infinite();
        nbits[static_cast<std::size_t>(i)] = b.is_infinite() ? 0 : b.bits();
    }
}

} // namespace

SignalSampler::SignalSampler(const BeamformingSolution &sol, const Scenario &scenario, const SamplerSettings &settings)
    : scenario_(scenario), settings_(settings)
{
    scenario_.validate();
    require(settings.loading > 0.0, "sampler: loading factor must be positive");
    const int K = scenario.config.n_users;
    const int nt = scenario.config.n_tx;
    require(sol.W_c.rows() == nt && sol.W_c.cols() == K && sol.W_r.rows() == nt,
            "sampler: beamformers do not match the scenario");
    V_ = sol.V();
    const CMatrix r_x = covariance_rx(sol.W_c, sol.W_r);
    const auto &prof = scenario.profile;
    const auto &bits = scenario.config.bits;

    converter_setup(bits.dac_bits, prof.alpha_t, real_diagonal(r_x), dac_var_, dac_scale_, dac_on_, dac_bits_);

    const RadarCovariances rc = radar_covariances(scenario.channels.G, prof, r_x, scenario.config.sigma_r2);
    converter_setup(bits.adc_bits_bs, prof.alpha_r, real_diagonal(rc.R_ybs), adc_var_, adc_scale_, adc_on_,
                    adc_bits_);

    // E|y_k|^2 = h^H (A_t R_x A_t + R_qt) h + sigma_k^2
    const CMatrix at = prof.gain_tx();
    const CMatrix r_xq = at * r_x * at + rc.R_qt;
    RVector p_user(K);
    for (int k = 0; k < K; ++k)
    {
        const CVector h = scenario.channels.user(k);
        p_user(k) = h.dot(r_xq * h).real() + scenario.config.sigma_k2;
    }
    converter_setup(bits.adc_bits_user, prof.alpha_user, p_user, user_var_, user_scale_, user_on_, user_bits_);
}

namespace
{

/// Quantize chain i of z in place under the chosen model.
void convert(CVector &z, const RVector &alpha, const RVector &var, const RVector &scale,
             const std::vector<bool> &on, const std::vector<int> &bits, const SamplerSettings &st,
             RngStream &rng)
{
    for (Eigen::Index i = 0; i < z.size(); ++i)
    {
        if (!on[static_cast<std::size_t>(i)])
            continue;
        if (st.mode == SamplerMode::Aqnm)
            z(i) = alpha(i) * z(i) + rng.complex_normal(var(i));
        else if (scale(i) > 0.0)
        {
            const MidriseQuantizer q(bits[static_cast<std::size_t>(i)], st.loading);
            z(i) = {q.quantize(z(i).real(), scale(i)), q.quantize(z(i).imag(), scale(i))};
        }
        else
            z(i) = 0.0; // idle chain
    }
}

} // namespace

CVector SignalSampler::transmit(const CVector &x, RngStream &rng) const
{
    CVector x_q = x;
    convert(x_q, scenario_.profile.alpha_t, dac_var_, dac_scale_, dac_on_, dac_bits_, settings_, rng);
    return x_q;
}

CVector SignalSampler::receive(const CVector &x_q, RngStream &rng, bool target_present, CVector *y_bs) const
{
    const auto nr = scenario_.channels.G.rows();
    CVector y = rng.complex_normal(nr, 1, scenario_.config.sigma_r2);
    if (target_present)
        y += scenario_.channels.G * x_q;
    if (y_bs)
        *y_bs = y;
    RVector var = adc_var_;
    if (!target_present && settings_.mode == SamplerMode::Aqnm)
    {
        // the additive model follows the actual input power
        for (Eigen::Index i = 0; i < var.size(); ++i)
            var(i) = scenario_.profile.alpha_r(i) * (1.0 - scenario_.profile.alpha_r(i)) * scenario_.config.sigma_r2;
    }
    convert(y, scenario_.profile.alpha_r, var, adc_scale_, adc_on_, adc_bits_, settings_, rng);
    return y;
}

Snapshot SignalSampler::draw(RngStream &rng, bool target_present) const
{
    Snapshot s;
    s.s = rng.complex_normal(V_.cols(), 1);
    s.x = V_ * s.s;
    s.x_q = transmit(s.x, rng);
    s.y_bs_q = receive(s.x_q, rng, target_present, &s.y_bs);
    const int K = scenario_.config.n_users;
    s.y_users.resize(K);
    for (int k = 0; k < K; ++k)
        s.y_users(k) = (scenario_.channels.H.row(k) * s.x_q).value() + rng.complex_normal(scenario_.config.sigma_k2);
    s.y_users_q = s.y_users;
    convert(s.y_users_q, scenario_.profile.alpha_user, user_var_, user_scale_, user_on_, user_bits_, settings_, rng);
    return s;
}

CVector SignalSampler::draw_radar(RngStream &rng, bool target_present) const
{
    const CVector s = rng.complex_normal(V_.cols(), 1);
    const CVector x_q = transmit(V_ * s, rng);
    return receive(x_q, rng, target_present, nullptr);
}

RadarSqnrEstimate estimate_radar_sqnr(const SignalSampler &sampler, const CVector &u, int snapshots,
                                      RngStream &rng)
{
    const auto m = sampler.V().cols();
    require(snapshots > m, "estimate_radar_sqnr: need more snapshots than symbols");
    CMatrix r_ys, r_yy, r_ss = CMatrix::Zero(m, m);
    for (int l = 0; l < snapshots; ++l)
    {
        const Snapshot s = sampler.draw(rng);
        if (l == 0)
        {
            r_ys = CMatrix::Zero(s.y_bs_q.size(), m);
            r_yy = CMatrix::Zero(s.y_bs_q.size(), s.y_bs_q.size());
        }
        r_ys.noalias() += s.y_bs_q * s.s.adjoint();
        r_yy.noalias() += s.y_bs_q * s.y_bs_q.adjoint();
        r_ss.noalias() += s.s * s.s.adjoint();
    }
    // least-squares fit y = C s + e; subtracting the fitted part with the
    // sample symbol covariance keeps sampling error of the (large) signal
    // term out of the residual
    const Eigen::LLT<CMatrix> ss(r_ss);
    const CMatrix c = ss.solve(r_ys.adjoint()).adjoint();
    RadarSqnrEstimate e;
    e.S = hermitian_part(c * c.adjoint());
    e.Q = hermitian_part(r_yy - c * r_ys.adjoint()) / static_cast<double>(snapshots - m);
    Eigen::LLT<CMatrix> llt(e.Q);
    if (llt.info() != Eigen::Success)
        throw NumericalError("estimate_radar_sqnr: residual covariance is not positive definite");
    const CMatrix l_inv_s = llt.matrixL().solve(e.S);
    const CMatrix w = llt.matrixL().solve(l_inv_s.adjoint()).adjoint();
    e.trace = w.trace().real();
    e.lambda_max = max_eigenvalue(hermitian_part(w));
    if (u.size() == e.S.rows())
        e.quotient = u.dot(e.S * u).real() / u.dot(e.Q * u).real();
    return e;
}

} // namespace quantbeam
