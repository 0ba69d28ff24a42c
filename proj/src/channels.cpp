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

#include "sucre/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sucre
{

CellGeometry CellGeometry::standard(double hex_radius_m, double min_distance_m)
{
    if (!(min_distance_m < hex_radius_m) || !(min_distance_m > 0.0))
        throw std::invalid_argument("CellGeometry: need 0 < min_distance < hex_radius");
    CellGeometry g;
    g.hex_radius_m = hex_radius_m;
    g.min_distance_m = min_distance_m;
    g.bs_positions[0] = {0.0, 0.0};
    const double d = std::sqrt(3.0) * hex_radius_m;
    for (int k = 0; k < 6; ++k)
    {
        const double a = std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
        g.bs_positions[k + 1] = {d * std::cos(a), d * std::sin(a)};
    }
    return g;
}

bool CellGeometry::inside_hexagon(Vec2 o) const
{
    const double s3 = std::sqrt(3.0);
    const double ax = std::fabs(o.x), ay = std::fabs(o.y);
    return ay <= 0.5 * s3 * hex_radius_m && s3 * ax + ay <= s3 * hex_radius_m;
}

double LargeScaleModel::calibration(double hex_radius_m) const
{
    return std::pow(10.0, corner_snr_db / 10.0) * std::pow(hex_radius_m, pathloss_exponent);
}

double LargeScaleModel::median_gain(double distance_m, double hex_radius_m) const
{
    return std::pow(10.0, corner_snr_db / 10.0) * std::pow(distance_m / hex_radius_m, -pathloss_exponent);
}

double UeLink::angle_to_center() const
{
    return std::atan2(position.y, position.x);
}

std::vector<Vec2> drop_ues(const CellGeometry &geom, int cell, int count, Rng &rng)
{
    if (count < 0)
        throw std::invalid_argument("drop_ues: negative count");
    const double R = geom.hex_radius_m;
    const double h = 0.5 * std::sqrt(3.0) * R;
    std::uniform_real_distribution<double> ux(-R, R), uy(-h, h);
    const Vec2 c = geom.bs_positions.at(cell);

    std::vector<Vec2> out;
    out.reserve(count);
    while (int(out.size()) < count)
    {
        const Vec2 o{ux(rng), uy(rng)};
        if (!geom.inside_hexagon(o) || std::hypot(o.x, o.y) < geom.min_distance_m)
            continue;
        out.push_back({c.x + o.x, c.y + o.y});
    }
    return out;
}

double large_scale_gain(double distance_m, const LargeScaleModel &model, double hex_radius_m, Rng &rng)
{
    std::normal_distribution<double> shadow(0.0, model.shadow_std_db);
    return model.median_gain(distance_m, hex_radius_m) * std::pow(10.0, shadow(rng) / 10.0);
}

constexpr double kDbToLn = 0.23025850929940458; // ln(10) / 10

UeLink drop_ue_link(const CellGeometry &geom, const LargeScaleModel &model, int cell, Rng &rng, int max_redraws)
{
    std::normal_distribution<double> shadow(0.0, model.shadow_std_db);
    UeLink ue;
    ue.serving_cell = cell;
    std::array<double, kCellCount> median{};
    for (;;)
    {
        ue.position = drop_ues(geom, cell, 1, rng).front();
        for (int b = 0; b < kCellCount; ++b)
        {
            const Vec2 bs = geom.bs_positions[b];
            median[b] = model.median_gain(std::hypot(ue.position.x - bs.x, ue.position.y - bs.y), geom.hex_radius_m);
        }
        for (int attempt = 0; attempt < max_redraws; ++attempt)
        {
            // Serving gain first; stop drawing once another BS beats it.
            ue.beta[cell] = median[cell] * std::exp(kDbToLn * shadow(rng));
            bool dominant = true;
            for (int b = 0; b < kCellCount && dominant; ++b)
            {
                if (b == cell)
                    continue;
                ue.beta[b] = median[b] * std::exp(kDbToLn * shadow(rng));
                dominant = ue.beta[b] < ue.beta[cell];
            }
            if (dominant)
                return ue;
        }
    }
}

Eigen::MatrixXcd exp_correlation_matrix(double r, double theta, int M)
{
    if (!(r >= 0.0 && r < 1.0))
        throw std::domain_error("exp_correlation: r must lie in [0, 1)");
    Eigen::MatrixXcd R(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            R(i, j) = std::pow(r, std::abs(j - i)) * std::polar(1.0, theta * (j - i));
    return R;
}

Eigen::MatrixXcd exp_correlation_sqrt(double r, double theta, int M)
{
    const Eigen::MatrixXcd R = exp_correlation_matrix(r, theta, M);
    if (r == 0.0)
        return Eigen::MatrixXcd::Identity(M, M);
    Eigen::LLT<Eigen::MatrixXcd> llt(R);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("exp_correlation_sqrt: factorization failed");
    return llt.matrixL();
}

Eigen::VectorXcd sample_channel(const ChannelModel &model, double beta, double angle, int M, Rng &rng)
{
    if (M < 1)
        throw std::invalid_argument("sample_channel: M must be >= 1");
    Eigen::VectorXcd h(M);
    const double sb = std::sqrt(beta);
    switch (model.kind)
    {
    case ChannelKind::UncorrelatedRayleigh:
        for (int i = 0; i < M; ++i)
            h[i] = sb * complex_normal(rng);
        break;
    case ChannelKind::CorrelatedRayleigh:
    {
        if (!(model.r >= 0.0 && model.r < 1.0))
            throw std::domain_error("sample_channel: r must lie in [0, 1)");
        // The Cholesky factor of the exponential model is a first-order
        // recursion, so F x costs O(M).
        const cdouble c = model.r * std::polar(1.0, -angle);
        const double s = std::sqrt(1.0 - model.r * model.r);
        cdouble x = complex_normal(rng);
        h[0] = sb * x;
        for (int i = 1; i < M; ++i)
        {
            x = c * x + s * complex_normal(rng);
            h[i] = sb * x;
        }
        break;
    }
    case ChannelKind::LosUla:
    {
        const double ph = -std::numbers::pi * std::sin(angle);
        for (int i = 0; i < M; ++i)
            h[i] = sb * std::polar(1.0, ph * i);
        break;
    }
    }
    return h;
}

std::vector<UlInterference> ul_interference_block(const InterferenceScene &scene, int M, int tau_p, Rng &rng)
{
    if (tau_p < 1 || M < 1)
        throw std::invalid_argument("ul_interference: need M >= 1 and tau_p >= 1");
    std::vector<UlInterference> out(tau_p);
    for (auto &u : out)
        u.vec = Eigen::VectorXcd::Zero(M);

    const double inv_norm = 1.0 / std::sqrt(double(tau_p));
    std::vector<cdouble> twiddle(tau_p);
    for (int k = 0; k < tau_p; ++k)
        twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / tau_p);
    std::vector<cdouble> d(tau_p);
    for (double bw : scene.data_betas)
    {
        Eigen::VectorXcd w(M);
        const double sb = std::sqrt(bw);
        for (int i = 0; i < M; ++i)
            w[i] = sb * complex_normal(rng);
        for (auto &s : d)
            s = complex_normal(rng);
        for (int t = 0; t < tau_p; ++t)
        {
            cdouble coef = 0.0;
            for (int n = 0; n < tau_p; ++n)
                coef += d[n] * twiddle[(t * n) % tau_p];
            out[t].vec += (coef * inv_norm) * w;
        }
    }
    for (const auto &ra : scene.ra)
    {
        if (ra.pilot < 0 || ra.pilot >= tau_p || ra.g.size() != M)
            throw std::invalid_argument("ul_interference: malformed RA interferer");
        out[ra.pilot].vec += std::sqrt(ra.rho * tau_p) * ra.g;
    }
    for (auto &u : out)
        u.omega = u.vec.squaredNorm() / M;
    return out;
}

UlInterference ul_interference(const InterferenceScene &scene, int M, int tau_p, Rng &rng)
{
    return ul_interference_block(scene, M, tau_p, rng).front();
}

InterferenceScene draw_neighbor_scene(const InterferenceConfig &cfg, Rng &rng)
{
    InterferenceScene s;
    if (!cfg.enabled)
        return s;
    s.data_betas.reserve(cfg.geometry.neighbor_count * cfg.ues_per_neighbor);
    for (int c = 1; c <= cfg.geometry.neighbor_count; ++c)
        for (int k = 0; k < cfg.ues_per_neighbor; ++k)
            s.data_betas.push_back(drop_ue_link(cfg.geometry, cfg.model, c, rng).beta[0]);
    return s;
}

double mean_ul_interference(const InterferenceConfig &cfg, int trials, Rng &rng)
{
    if (trials < 1)
        throw std::invalid_argument("mean_ul_interference: trials must be >= 1");
    if (!cfg.enabled)
        return 0.0;
    double acc = 0.0;
    for (int i = 0; i < trials; ++i)
    {
        const InterferenceScene s = draw_neighbor_scene(cfg, rng);
        acc += ul_interference(s, cfg.M, cfg.tau_p, rng).omega;
    }
    return acc / trials;
}

double dl_interference_variance(const UeLink &ue, double q, int streams)
{
    double sum = 0.0;
    for (int b = 0; b < kCellCount; ++b)
        if (b != ue.serving_cell)
            sum += ue.beta[b];
    return q * streams * sum;
}

} // namespace sucre
