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

#ifndef SUCRE_CHANNELS_HPP
#define SUCRE_CHANNELS_HPP

#include "sucre/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace sucre
{

struct Vec2
{
    double x = 0.0;
    double y = 0.0;
};

inline constexpr int kCellCount = 7; // center cell plus one ring

// Hexagonal cells with corners at 0, 60, ... degrees. Cell 0 is the center.
struct CellGeometry
{
    double hex_radius_m = 250.0;
    double min_distance_m = 25.0;
    int neighbor_count = 6;
    std::array<Vec2, kCellCount> bs_positions{};

    static CellGeometry standard(double hex_radius_m = 250.0, double min_distance_m = 25.0);

    // Offset relative to a BS lies in that BS's hexagon.
    bool inside_hexagon(Vec2 offset) const;
};

struct LargeScaleModel
{
    double pathloss_exponent = 3.8;
    double shadow_std_db = 10.0;
    double corner_snr_db = 0.0; // median SNR of a full-power UE at a cell corner

    static LargeScaleModel non_los() { return {3.8, 10.0, 0.0}; }
    static LargeScaleModel los() { return {2.5, 4.0, 33.0}; }

    // Linear intercept c in beta = c * d^-kappa, with sigma^2 = rho = 1.
    double calibration(double hex_radius_m) const;

    // Median gain (no shadowing) at distance d.
    double median_gain(double distance_m, double hex_radius_m) const;
};

enum class ChannelKind
{
    UncorrelatedRayleigh,
    CorrelatedRayleigh,
    LosUla
};

struct ChannelModel
{
    ChannelKind kind = ChannelKind::UncorrelatedRayleigh;
    double r = 0.7; // adjacent-antenna correlation, CorrelatedRayleigh only
};

// Large-scale state of one UE: absolute position, serving cell and the gain
// towards every BS.
struct UeLink
{
    Vec2 position;
    int serving_cell = 0;
    std::array<double, kCellCount> beta{};

    double serving_beta() const { return beta[serving_cell]; }
    // Direction of the UE seen from BS 0.
    double angle_to_center() const;
};

// Uniform positions over the hexagon of `cell` minus the inner disc.
std::vector<Vec2> drop_ues(const CellGeometry &geom, int cell, int count, Rng &rng);

// Single link gain with independent log-normal shadowing.
double large_scale_gain(double distance_m, const LargeScaleModel &model, double hex_radius_m, Rng &rng);

// Drop one UE in `cell` and draw shadowing towards all BSs, redrawing the
// shadowing (at most max_redraws times per position, then a new position)
// until the serving BS has the largest gain.
UeLink drop_ue_link(const CellGeometry &geom, const LargeScaleModel &model, int cell, Rng &rng,
                    int max_redraws = 100);

Eigen::VectorXcd sample_channel(const ChannelModel &model, double beta, double angle, int M, Rng &rng);

// [R]_{ij} = r^{|j-i|} exp(j theta (j - i))
Eigen::MatrixXcd exp_correlation_matrix(double r, double theta, int M);

// Lower-triangular F with F F^H = R.
Eigen::MatrixXcd exp_correlation_sqrt(double r, double theta, int M);

struct RaInterferer
{
    int pilot = 0;
    double rho = 1.0;
    Eigen::VectorXcd g;
};

// Neighbor-cell activity seen by BS 0 during the RA pilot phase.
struct InterferenceScene
{
    std::vector<double> data_betas; // gains of data UEs towards BS 0
    std::vector<RaInterferer> ra;
};

struct UlInterference
{
    Eigen::VectorXcd vec; // W psi_t^* / ||psi_t||
    double omega = 0.0;   // ||vec||^2 / M
};

// All tau_p pilots of one block. Data UEs get uncorrelated Rayleigh channels
// and i.i.d. CN(0,1) symbols; pilots are the DFT basis.
std::vector<UlInterference> ul_interference_block(const InterferenceScene &scene, int M, int tau_p, Rng &rng);

// Pilot 0 only.
UlInterference ul_interference(const InterferenceScene &scene, int M, int tau_p, Rng &rng);

struct InterferenceConfig
{
    bool enabled = false;
    CellGeometry geometry = CellGeometry::standard();
    LargeScaleModel model = LargeScaleModel::non_los();
    int ues_per_neighbor = 10;
    int M = 100;
    int tau_p = 10;
};

InterferenceScene draw_neighbor_scene(const InterferenceConfig &cfg, Rng &rng);

// Monte-Carlo mean of omega_t over drops, shadowing and small-scale fading.
double mean_ul_interference(const InterferenceConfig &cfg, int trials, Rng &rng);

// Variance of the downlink interference at a center-cell UE when every
// neighbor BS transmits `streams` unit-power streams of power q.
double dl_interference_variance(const UeLink &ue, double q, int streams);

} // namespace sucre

#endif
