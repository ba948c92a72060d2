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

#include "quantbeam/channel.hpp"
#include "quantbeam/units.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace quantbeam;

TEST_CASE("steering vectors")
{
    const CVector a0 = steering_tx(0.0, 4);
    CHECK((a0 - CVector::Ones(4)).norm() == 0.0);
    CHECK((steering_rx(0.0, 4) - CVector::Ones(4)).norm() == 0.0);

    const CVector a90 = steering_tx(std::numbers::pi / 2.0, 3);
    CHECK(std::abs(a90(1) - cdouble(-1.0, 0.0)) < 1e-15);
    CHECK(std::abs(a90(2) - cdouble(1.0, 0.0)) < 1e-15);

    const double theta = units::deg_to_rad(40.0);
    const CVector a40 = steering_tx(theta, 2);
    const CVector b40 = steering_rx(theta, 2);
    // pi sin(40 deg) = 2.0193768...
    CHECK(std::arg(a40(1)) == doctest::Approx(-2.0193768).epsilon(1e-7));
    CHECK(std::arg(b40(1)) == doctest::Approx(2.0193768).epsilon(1e-7));
    CHECK((b40 - a40.conjugate()).norm() < 1e-15);

    for (int n : {1, 5, 16})
    {
        const CVector a = steering_tx(0.3, n);
        CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
        CHECK(a.squaredNorm() == doctest::Approx(n).epsilon(1e-14));
    }
    CHECK_THROWS_AS((void)steering_tx(0.1, 0), std::invalid_argument);
}

TEST_CASE("point target response")
{
    RngStream rng(1, 0, StreamTag::TargetResponse);
    const CMatrix g = make_trm(PointTarget{0.0, {1.0, 0.0}}, 2, 2, rng);
    CHECK((g - CMatrix::Ones(2, 2)).norm() < 1e-15);

    const PointTarget pt{units::deg_to_rad(40.0), {0.2, -0.25}};
    const CMatrix g2 = make_trm(pt, 6, 5, rng);
    CHECK(numerical_rank(g2, 1e-10) == 1);
    const CVector a = steering_tx(pt.theta, 5);
    const CMatrix expect = std::norm(pt.eta) * 6.0 * a * a.adjoint();
    CHECK((g2.adjoint() * g2 - expect).norm() < 1e-12);

    CHECK_THROWS_AS(make_trm(PointTarget{0.1, {0.0, 0.0}}, 2, 2, rng), std::invalid_argument);
}

TEST_CASE("extended and custom targets")
{
    RngStream rng(3, 0, StreamTag::TargetResponse);
    double acc = 0.0;
    const int draws = 100000 / 16 + 1;
    for (int i = 0; i < draws; ++i)
        acc += make_trm(ExtendedTarget{0.1}, 4, 4, rng).cwiseAbs2().sum();
    CHECK(acc / (16.0 * draws) == doctest::Approx(0.1).epsilon(0.01));
    CHECK_THROWS_AS(make_trm(ExtendedTarget{0.0}, 2, 2, rng), std::invalid_argument);

    const CMatrix g = CMatrix::Random(3, 2);
    CHECK(make_trm(CustomTarget{g}, 3, 2, rng) == g);
    CHECK_THROWS_AS(make_trm(CustomTarget{g}, 2, 2, rng), std::invalid_argument);
}

TEST_CASE("rayleigh channels")
{
    RngStream a(9, 0, StreamTag::UserChannels);
    const CMatrix h = rayleigh_channels(100, 1000, a);
    CHECK(h.cwiseAbs2().mean() == doctest::Approx(1.0).epsilon(0.01));
    CHECK(h.norm() > 0.0);

    RngStream b(9, 0, StreamTag::UserChannels);
    CHECK(rayleigh_channels(100, 1000, b) == h);
}

TEST_CASE("channel sets are reproducible per trial")
{
    const TargetModel t = ExtendedTarget{0.1};
    const ChannelSet c1 = draw_channels(t, 4, 16, 16, 42, 7);
    const ChannelSet c2 = draw_channels(t, 4, 16, 16, 42, 7);
    const ChannelSet c3 = draw_channels(t, 4, 16, 16, 42, 8);
    CHECK(c1.H == c2.H);
    CHECK(c1.G == c2.G);
    CHECK(c1.H != c3.H);
    CHECK(c1.n_users() == 4);
    CHECK(c1.n_tx() == 16);
    CHECK(c1.n_rx() == 16);
    CHECK((c1.user(2) - c1.H.row(2).adjoint()).norm() == 0.0);

    // more users never perturbs the target draw
    const ChannelSet c4 = draw_channels(t, 6, 16, 16, 42, 7);
    CHECK(c4.G == c1.G);
}
