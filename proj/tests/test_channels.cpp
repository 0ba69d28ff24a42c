// SPDX-License-Identifier: Apache-2.0
//
// sucre-sim: Monte-Carlo and analytic toolkit for strongest-user collision resolution
// Copyright (C) 2026 The sucre-sim authors
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

#include "catch_amalgamated.hpp"

#include "sucre/channels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace sucre;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

double norm2(Vec2 v)
{
    return std::hypot(v.x, v.y);
}

// Point-in-hexagon test in polar form, independent of the library's test.
bool in_hexagon_polar(Vec2 v, double R)
{
    const double r = norm2(v);
    double phi = std::fmod(std::atan2(v.y, v.x), std::numbers::pi / 3.0);
    if (phi < 0.0)
        phi += std::numbers::pi / 3.0;
    const double apothem = 0.5 * std::sqrt(3.0) * R;
    return r * std::cos(phi - std::numbers::pi / 6.0) <= apothem;
}

struct Moments
{
    double mean = 0.0;
    double var = 0.0;
};

template <class F> Moments moments(int n, F draw)
{
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double v = draw();
        s += v;
        ss += v * v;
    }
    Moments m;
    m.mean = s / n;
    m.var = (ss - n * m.mean * m.mean) / (n - 1);
    return m;
}

} // namespace

TEST_CASE("geometry - neighbor layout")
{
    const auto g = CellGeometry::standard();
    CHECK(g.bs_positions[0].x == 0.0);
    CHECK(g.bs_positions[0].y == 0.0);
    for (int b = 1; b < kCellCount; ++b)
        CHECK_THAT(norm2(g.bs_positions[b]), WithinRel(std::sqrt(3.0) * 250.0, 1e-12));
    CHECK(g.inside_hexagon({249.0, 0.0}));
    CHECK_FALSE(g.inside_hexagon({0.0, 220.0}));
}

TEST_CASE("drop_ues - support and mean distance")
{
    Rng rng(11);
    const auto g = CellGeometry::standard();
    CHECK(drop_ues(g, 0, 0, rng).empty());
    CHECK_THROWS_AS(drop_ues(g, 0, -1, rng), std::invalid_argument);

    const auto pts = drop_ues(g, 0, 100000, rng);
    REQUIRE(pts.size() == 100000);
    double mean = 0.0;
    for (const auto &p : pts)
    {
        const double d = norm2(p);
        REQUIRE(d >= 25.0);
        REQUIRE(d <= 250.0 + 1e-9);
        REQUIRE(in_hexagon_polar(p, 250.0));
        mean += d;
    }
    mean /= pts.size();

    // Oracle: rejection from the circumscribed disc with the polar test.
    Rng orng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double omean = 0.0;
    int kept = 0;
    while (kept < 200000)
    {
        const double r = 250.0 * std::sqrt(u(orng));
        const double t = 2.0 * std::numbers::pi * u(orng);
        const Vec2 v{r * std::cos(t), r * std::sin(t)};
        if (r < 25.0 || !in_hexagon_polar(v, 250.0))
            continue;
        omean += r;
        ++kept;
    }
    omean /= kept;
    CHECK_THAT(mean, WithinRel(omean, 0.01));
}

TEST_CASE("drop_ues - neighbor cells are offset")
{
    Rng rng(3);
    const auto g = CellGeometry::standard();
    for (int b = 1; b < kCellCount; ++b)
        for (const auto &p : drop_ues(g, b, 500, rng))
        {
            const Vec2 off{p.x - g.bs_positions[b].x, p.y - g.bs_positions[b].y};
            REQUIRE(in_hexagon_polar(off, 250.0));
            REQUIRE(norm2(off) >= 25.0);
        }
}

TEST_CASE("large_scale - corner calibration and power law")
{
    const auto nl = LargeScaleModel::non_los();
    const auto los = LargeScaleModel::los();
    CHECK_THAT(nl.median_gain(250.0, 250.0), WithinRel(1.0, 1e-12));
    CHECK_THAT(los.median_gain(250.0, 250.0), WithinRel(std::pow(10.0, 3.3), 1e-12));
    CHECK_THAT(nl.median_gain(50.0, 250.0) / nl.median_gain(100.0, 250.0), WithinRel(std::pow(2.0, 3.8), 1e-12));
    CHECK_THAT(los.median_gain(50.0, 250.0) / los.median_gain(100.0, 250.0), WithinRel(std::pow(2.0, 2.5), 1e-12));
}

TEST_CASE("large_scale - shadowing statistics in dB")
{
    Rng rng(5);
    const auto nl = LargeScaleModel::non_los();
    const double med_db = 10.0 * std::log10(nl.median_gain(120.0, 250.0));
    const auto m = moments(200000, [&] { return 10.0 * std::log10(large_scale_gain(120.0, nl, 250.0, rng)); });
    CHECK_THAT(m.mean, WithinAbs(med_db, 3.0 * 10.0 / std::sqrt(200000.0)));
    CHECK_THAT(std::sqrt(m.var), WithinRel(10.0, 0.01));
}

TEST_CASE("drop_ue_link - serving dominance")
{
    Rng rng(21);
    const auto g = CellGeometry::standard();
    for (const auto &model : {LargeScaleModel::non_los(), LargeScaleModel::los()})
        for (int cell = 0; cell < kCellCount; ++cell)
            for (int i = 0; i < 300; ++i)
            {
                const UeLink ue = drop_ue_link(g, model, cell, rng);
                REQUIRE(ue.serving_cell == cell);
                for (int b = 0; b < kCellCount; ++b)
                    REQUIRE(ue.serving_beta() >= ue.beta[b]);
            }
}

TEST_CASE("sample_channel - LoS steering vector")
{
    Rng rng(1);
    const auto h = sample_channel({ChannelKind::LosUla, 0.0}, 4.0, 0.0, 2, rng);
    CHECK_THAT(h[0].real(), WithinAbs(2.0, 1e-15));
    CHECK_THAT(h[1].real(), WithinAbs(2.0, 1e-15));
    CHECK_THAT(h[0].imag(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(h[1].imag(), WithinAbs(0.0, 1e-15));

    for (double phi : {-1.2, 0.3, 0.9})
    {
        const auto g = sample_channel({ChannelKind::LosUla, 0.0}, 2.5, phi, 64, rng);
        CHECK_THAT(g.squaredNorm(), WithinRel(64 * 2.5, 1e-13));
        CHECK_THAT(std::arg(g[1] / g[0]), WithinAbs(std::remainder(-std::numbers::pi * std::sin(phi), 2.0 * std::numbers::pi), 1e-12));
    }
}

TEST_CASE("sample_channel - uncorrelated gain")
{
    Rng rng(2);
    const double beta = 0.37;
    const auto m = moments(10000, [&] {
        return sample_channel({ChannelKind::UncorrelatedRayleigh, 0.0}, beta, 0.0, 100, rng).squaredNorm() / 100.0;
    });
    CHECK(std::abs(m.mean - beta) < 3.0 * std::sqrt(m.var / 10000));
}

TEST_CASE("sample_channel - correlated covariance")
{
    Rng rng(4);
    const int M = 8, N = 100000;
    const double beta = 2.0, theta = 0.6;
    const Eigen::MatrixXcd R = exp_correlation_matrix(0.7, theta, M);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(M, M);
    for (int n = 0; n < N; ++n)
    {
        const Eigen::VectorXcd h = sample_channel({ChannelKind::CorrelatedRayleigh, 0.7}, beta, theta, M, rng);
        C += h * h.adjoint();
    }
    C /= double(N);
    const double se = beta / std::sqrt(double(N));
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
        {
            const std::complex<double> ref = beta * R(i, j);
            INFO("i=" << i << " j=" << j);
            CHECK(std::abs(C(i, j) - ref) <= std::max(0.05 * std::abs(ref), 4.0 * se));
        }
}

TEST_CASE("exp_correlation - structure and factor")
{
    const Eigen::MatrixXcd F0 = exp_correlation_sqrt(0.0, 0.4, 5);
    CHECK((F0 - Eigen::MatrixXcd::Identity(5, 5)).norm() == 0.0);

    const Eigen::MatrixXcd R3 = exp_correlation_matrix(0.7, 0.0, 3);
    CHECK_THAT(R3(0, 1).real(), WithinAbs(0.7, 1e-15));
    CHECK_THAT(R3(0, 2).real(), WithinAbs(0.49, 1e-15));

    const Eigen::MatrixXcd R = exp_correlation_matrix(0.7, std::numbers::pi / 4.0, 16);
    CHECK((R - R.adjoint()).norm() < 1e-14);
    for (int i = 0; i < 16; ++i)
        CHECK_THAT(R(i, i).real(), WithinAbs(1.0, 1e-15));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);

    const Eigen::MatrixXcd F = exp_correlation_sqrt(0.7, std::numbers::pi / 4.0, 16);
    CHECK((F * F.adjoint() - R).norm() < 1e-12);

    CHECK_THROWS_AS(exp_correlation_sqrt(1.0, 0.0, 4), std::domain_error);
    CHECK_THROWS_AS(exp_correlation_sqrt(-0.1, 0.0, 4), std::domain_error);
}

TEST_CASE("channel hardening - norm concentrates at M=1000")
{
    Rng rng(8);
    const int M = 1000;
    for (const ChannelModel cm : {ChannelModel{ChannelKind::UncorrelatedRayleigh, 0.0},
                                  ChannelModel{ChannelKind::CorrelatedRayleigh, 0.7}})
    {
        const double beta = 1.5;
        const auto m = moments(10000, [&] { return sample_channel(cm, beta, 0.2, M, rng).squaredNorm() / M; });
        CHECK(m.var < 1.5 * 2.0 * beta * beta / M);
        CHECK_THAT(m.mean, WithinRel(beta, 0.01));
    }
}

TEST_CASE("favorable propagation - inner products vanish at M=1000")
{
    Rng rng(9);
    const int M = 1000;
    std::uniform_real_distribution<double> ang(-std::numbers::pi / 2, std::numbers::pi / 2);
    for (const ChannelModel cm : {ChannelModel{ChannelKind::UncorrelatedRayleigh, 0.0},
                                  ChannelModel{ChannelKind::CorrelatedRayleigh, 0.7}})
    {
        const double bk = 0.8, bi = 2.0;
        const auto m = moments(10000, [&] {
            const auto hk = sample_channel(cm, bk, ang(rng), M, rng);
            const auto hi = sample_channel(cm, bi, ang(rng), M, rng);
            return std::abs(hk.dot(hi)) / M;
        });
        CHECK(m.mean < 0.05 * std::sqrt(bk * bi));
    }

    // LoS: Dirichlet kernel.
    for (auto [pk, pi] : {std::pair{0.1, 0.5}, std::pair{-0.7, 0.2}, std::pair{0.3, 0.3}})
    {
        const auto hk = sample_channel({ChannelKind::LosUla, 0.0}, 1.0, pk, M, rng);
        const auto hi = sample_channel({ChannelKind::LosUla, 0.0}, 1.0, pi, M, rng);
        const double d = std::sin(pk) - std::sin(pi);
        const double ref = d == 0.0 ? M : std::abs(std::sin(M * std::numbers::pi * d / 2) / std::sin(std::numbers::pi * d / 2));
        CHECK_THAT(std::abs(hk.dot(hi)), WithinRel(ref, 1e-8));
        if (d != 0.0)
            CHECK(std::abs(hk.dot(hi)) / M < 0.05);
    }
}

TEST_CASE("ul_interference - simple scenes")
{
    Rng rng(13);
    InterferenceScene empty;
    const auto z = ul_interference(empty, 16, 10, rng);
    CHECK(z.vec.size() == 16);
    CHECK(z.vec.norm() == 0.0);
    CHECK(z.omega == 0.0);

    InterferenceScene one;
    Eigen::VectorXcd g = Eigen::VectorXcd::LinSpaced(16, 0.1, 1.6);
    g[3] = {0.0, -2.0};
    one.ra.push_back({0, 0.3, g});
    const auto r = ul_interference(one, 16, 10, rng);
    CHECK((r.vec - std::sqrt(0.3 * 10.0) * g).norm() < 1e-14);
    CHECK_THAT(r.omega, WithinRel(r.vec.squaredNorm() / 16.0, 1e-14));

    // An RA interferer on another pilot does not leak into pilot 0.
    InterferenceScene other;
    other.ra.push_back({4, 1.0, g});
    CHECK(ul_interference(other, 16, 10, rng).vec.norm() == 0.0);
}

TEST_CASE("ul_interference - data interferer moment")
{
    Rng rng(14);
    InterferenceScene s;
    double total = 0.0;
    for (int l = 0; l < 10; ++l)
    {
        s.data_betas.push_back(0.05 * (l + 1));
        total += 0.05 * (l + 1);
    }
    const auto m = moments(10000, [&] { return ul_interference(s, 100, 10, rng).omega; });
    CHECK(std::abs(m.mean - total) < 3.0 * std::sqrt(m.var / 10000));

    // Every pilot of a block sees the same mean.
    const auto blk = ul_interference_block(s, 100, 10, rng);
    CHECK(blk.size() == 10);
}

TEST_CASE("mean_ul_interference - silent, determinism and seed stability")
{
    InterferenceConfig cfg;
    Rng r0(1);
    CHECK(mean_ul_interference(cfg, 100, r0) == 0.0);

    cfg.enabled = true;
    cfg.M = 1;
    Rng a(100), b(100);
    CHECK(mean_ul_interference(cfg, 2000, a) == mean_ul_interference(cfg, 2000, b));

    // Per-scene omega is heavy-tailed (log-normal shadowing), so the seed
    // spread is judged against its own standard error.
    Rng sr(303);
    const auto per_scene = moments(20000, [&] { return ul_interference(draw_neighbor_scene(cfg, sr), 1, 10, sr).omega; });
    const double se_diff = std::sqrt(2.0 * per_scene.var / 100000.0);

    Rng s1(101), s2(202);
    const double w1 = mean_ul_interference(cfg, 100000, s1);
    const double w2 = mean_ul_interference(cfg, 100000, s2);
    INFO("w1=" << w1 << " w2=" << w2 << " relative spread=" << std::abs(w1 - w2) / w1);
    CHECK(w1 > 0.0);
    CHECK(std::abs(w1 - w2) <= 3.0 * se_diff);
    CHECK(std::sqrt(per_scene.var / 100000.0) / per_scene.mean < 0.01);
}

TEST_CASE("dl_interference_variance - neighbor sum")
{
    UeLink ue;
    ue.beta = {5.0, 0.1, 0.2, 0.0, 0.05, 0.0, 0.15};
    CHECK_THAT(dl_interference_variance(ue, 1.0, 10), WithinRel(10.0 * 0.5, 1e-14));
    CHECK_THAT(dl_interference_variance(ue, 2.0, 10), WithinRel(20.0 * 0.5, 1e-14));
}
