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

#ifndef SUCRE_PROTOCOL_HPP
#define SUCRE_PROTOCOL_HPP

#include "sucre/analytics.hpp"
#include "sucre/channels.hpp"
#include "sucre/estimators.hpp"

#include <span>
#include <vector>

namespace sucre
{

enum class PowerPolicy
{
    Constant,  // rho = q
    Randomized // rho = q * 10^(-U[0, range]/10)
};

// Unit of the delta term in the bias.
enum class BiasScale
{
    PilotGain, // delta * rho beta tau_p / sqrt(M)
    BareGain   // delta * beta / sqrt(M)
};

struct BiasPolicy
{
    double delta = 0.0;
    BiasScale scale = BiasScale::PilotGain;
    double omega_bar = 0.0;

    double value(const UeLinkParams &p) const;
};

enum class ProtocolKind
{
    Sucre,
    Baseline // every contender repeats
};

struct RaBlockConfig
{
    int M = 100;
    int tau_p = 10;
    PilotLoadModel load{5000, 0.005, 10};
    ChannelModel channel{};
    LargeScaleModel large_scale = LargeScaleModel::non_los();
    CellGeometry geometry = CellGeometry::standard();
    PowerPolicy power = PowerPolicy::Constant;
    double power_range_db = 30.0;
    BiasPolicy bias{};
    bool interference = false;
    int ues_per_neighbor = 10;
    double q = 1.0;
    double sigma2 = 1.0;
    EstimatorKind estimator = EstimatorKind::Approx2;

    InterferenceConfig interference_config() const;
    void validate() const;
};

// Mean UL interference for this configuration; zero when neighbors are silent.
double calibrate_omega_bar(const RaBlockConfig &cfg, int trials, Rng &rng);

// What a contending UE knows about itself plus its channel geometry.
struct ContenderState
{
    double beta = 1.0;
    double rho = 1.0;
    double angle = 0.0;
    double upsilon = 0.0;
};

// Builds the contender state for a center-cell UE, drawing rho per policy.
ContenderState make_contender(const RaBlockConfig &cfg, const UeLink &ue, Rng &rng);

UeLinkParams link_params(const RaBlockConfig &cfg, const ContenderState &c);

enum class Decision
{
    Repeat,
    Inactive
};

enum class OutcomeClass
{
    Unused,
    SingletonAdmitted,
    Resolved,
    FalseNegative,
    FalsePositive
};

const char *to_string(OutcomeClass c);

struct PilotOutcome
{
    int pilot = 0;
    int contenders = 0;
    int repeaters = 0;
    OutcomeClass cls = OutcomeClass::Unused;

    bool admitted() const { return repeaters == 1; }
};

// Repeat iff rho beta tau_p > alpha_hat / 2 + eps.
Decision ue_decision(const AlphaEstimate &estimate, const UeLinkParams &p, double eps);

// Throws std::logic_error if repeaters > contenders or either is negative.
OutcomeClass classify_outcome(int contenders, int repeaters);

struct PilotSignals
{
    std::vector<Eigen::VectorXcd> channels;
    Eigen::VectorXcd y; // received RA pilot at BS 0
};

// Step 1: BS receives the sum of contenders, interference and noise.
PilotSignals receive_pilot(const RaBlockConfig &cfg, std::span<const ContenderState> cs, const Eigen::VectorXcd *ul,
                           Rng &rng);

// Step 2: maximum-ratio precoded DL pilot observed by every contender.
std::vector<cdouble> precoded_response(const RaBlockConfig &cfg, std::span<const ContenderState> cs,
                                       const PilotSignals &sig, Rng &rng);

// Step 3 decisions for all contenders of one pilot.
std::vector<Decision> contend_on_pilot(const RaBlockConfig &cfg, std::span<const ContenderState> cs,
                                       const Eigen::VectorXcd *ul, Rng &rng);

// ||y||^2 / M and the threshold test noise_floor * (1 + margin / sqrt(M)).
double activity_statistic(const Eigen::VectorXcd &y);
bool detect_activity(const Eigen::VectorXcd &y, double noise_floor, double margin = 4.0);

struct BlockContender
{
    UeLink link;
    int pilot = 0;
};

struct BlockResult
{
    std::vector<PilotOutcome> pilots; // one per pilot index
    std::vector<bool> admitted;       // per input contender
};

// Steps 1-4 for all pilots of one block with the contenders given.
BlockResult resolve_block(const RaBlockConfig &cfg, std::span<const BlockContender> contenders, ProtocolKind kind,
                          Rng &rng);

// Activation, pilot selection and resolution of one RA block.
std::vector<PilotOutcome> run_ra_block(const RaBlockConfig &cfg, Rng &rng);
std::vector<PilotOutcome> run_baseline_block(const RaBlockConfig &cfg, Rng &rng);

struct CrowdedConfig
{
    double activation = 0.001; // per idle UE per block
    double rejoin = 0.5;       // per backlogged UE per block
    int max_attempts = 10;
    int warmup_blocks = 300;
    int cohort_blocks = 1000; // UEs activating in these blocks are tracked
    bool redraw_link = true;  // new position and shadowing on every attempt
};

struct CrowdedStats
{
    long cohort = 0;
    long successes = 0;
    long failures = 0;
    long attempts_total = 0;
    long attempts_sq_total = 0;
    long blocks = 0;

    double success_fraction() const { return cohort ? double(successes) / cohort : 0.0; }
    double failure_fraction() const { return cohort ? double(failures) / cohort : 0.0; }
    double mean_attempts() const { return cohort ? double(attempts_total) / cohort : 0.0; }
};

CrowdedStats run_crowded_scenario(const RaBlockConfig &cfg, const CrowdedConfig &crowd, ProtocolKind kind, Rng &rng);

} // namespace sucre

#endif
