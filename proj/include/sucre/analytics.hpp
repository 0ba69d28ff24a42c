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

#ifndef SUCRE_ANALYTICS_HPP
#define SUCRE_ANALYTICS_HPP

#include "sucre/estimators.hpp"
#include "sucre/rng.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace sucre
{

// The contenders on one pilot, the UL interference power and per-UE biases.
struct ContentionScenario
{
    std::vector<UeLinkParams> contenders;
    double omega = 0.0;
    std::vector<double> bias; // empty means zero for everyone

    double alpha_t() const;
    double bias_of(std::size_t k) const { return bias.empty() ? 0.0 : bias.at(k); }
};

struct PilotLoadModel
{
    int K0 = 5000;
    double Pa = 0.005;
    int tau_p = 10;

    double select_probability() const { return Pa / tau_p; }
};

struct MeanVar
{
    double mean = 0.0;
    double variance = 0.0;
};

// One draw of z_k through the chi / Gaussian decomposition.
cdouble sample_zk(const ContentionScenario &s, std::size_t k, Rng &rng);

// Mean and variance of z_k / sqrt(M).
MeanVar zk_mean_var(const UeLinkParams &p, double alpha);

// Pr{Re(z_k) <= b}, clamped to [0, 1].
double cdf_re_zk(double b, const UeLinkParams &p, double alpha);

// Probability that contender k repeats its pilot when it uses approx2.
// Throws std::domain_error unless bias < rho beta tau_p / 2.
double repetition_probability(const ContentionScenario &s, std::size_t k);

// Gaussian approximation of Pr{Re(z_k) > b}; coarse for small M.
double asymptotic_ccdf(double b, const UeLinkParams &p, double alpha);

// Large-M limit of the repetition probability: 0, 1/2 or 1.
double asymptotic_repetition(double rho_beta_tau, double alpha, double eps);

double pilot_count_pmf(const PilotLoadModel &load, int n);
double collision_probability(const PilotLoadModel &load);

// E{ P_{|S|,resolved} | |S| >= 1 } with the binomial pilot load; the tail
// beyond cumulative mass 1 - 1e-9 is dropped. Throws std::invalid_argument if
// a size inside the retained mass is missing from per_size.
double resolved_probability_conditional(const std::map<int, double> &per_size, const PilotLoadModel &load);

// Largest size the truncated sum above visits.
int pilot_count_truncation(const PilotLoadModel &load);

long cdf_clamp_count();

} // namespace sucre

#endif
