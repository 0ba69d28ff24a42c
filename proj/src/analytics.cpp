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

#include "sucre/analytics.hpp"
#include "sucre/special_math.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sucre
{

namespace
{

std::atomic<long> g_cdf_clamps{0};

constexpr double kTruncationMass = 1e-9;

double clamp_probability(double v)
{
    if (v < 0.0 || v > 1.0)
    {
        g_cdf_clamps.fetch_add(1, std::memory_order_relaxed);
        return std::clamp(v, 0.0, 1.0);
    }
    return v;
}

} // namespace

double ContentionScenario::alpha_t() const
{
    double a = omega;
    for (const auto &c : contenders)
        a += c.gain();
    return a;
}

cdouble sample_zk(const ContentionScenario &s, std::size_t k, Rng &rng)
{
    const UeLinkParams &p = s.contenders.at(k);
    const auto [l1, l2] = lambda_pair(s.alpha_t(), p);
    std::chi_squared_distribution<double> chi2(2.0 * p.M);
    const double g = std::sqrt(0.5 * l1 * chi2(rng));
    return g + complex_normal(rng, l2);
}

MeanVar zk_mean_var(const UeLinkParams &p, double alpha)
{
    const auto [l1, l2] = lambda_pair(alpha, p);
    const double cm = gamma_ratio(p.M);
    const double M = p.M;
    MeanVar r;
    r.mean = std::sqrt(l1) * cm / std::sqrt(M);
    r.variance = l1 * (1.0 - cm * cm / M) + l2 / M;
    return r;
}

double cdf_re_zk(double b, const UeLinkParams &p, double alpha)
{
    if (b == std::numeric_limits<double>::infinity())
        return 1.0;
    if (b == -std::numeric_limits<double>::infinity())
        return 0.0;

    const auto [l1, l2] = lambda_pair(alpha, p);
    const double A = std::sqrt(1.0 / l1 + 1.0 / l2);
    const double B = b / (l2 * A);
    const double E = -b * b / (l1 + l2);
    const double base = E - 0.5 * std::log(std::numbers::pi * l2);
    const double ll1 = std::log(l1);

    const std::vector<double> logI = log_lemma_a2_table(2 * p.M - 2, A, B);
    double lmax = -std::numeric_limits<double>::infinity();
    std::vector<double> lt(p.M);
    for (int k = 0; k < p.M; ++k)
    {
        lt[k] = base - std::lgamma(k + 1.0) - k * ll1 + logI[2 * k];
        lmax = std::max(lmax, lt[k]);
    }
    double acc = 0.0;
    for (double v : lt)
        acc += std::exp(v - lmax);
    const double sum = std::exp(lmax) * acc;

    return clamp_probability(q_function(-b * std::numbers::sqrt2 / std::sqrt(l2)) - sum);
}

double repetition_probability(const ContentionScenario &s, std::size_t k)
{
    const UeLinkParams &p = s.contenders.at(k);
    const double eps = s.bias_of(k);
    if (!(eps < 0.5 * p.gain()))
        throw std::domain_error("repetition_probability: requires bias < rho beta tau_p / 2");

    const double cm = gamma_ratio(p.M);
    const double tau = p.tau_p;
    const double zeta = cm * cm * p.q * p.rho * p.beta * p.beta * tau * tau / (p.sigma2 + 2.0 * (p.gain() - eps));
    const double sz = std::sqrt(zeta);
    const double alpha = s.alpha_t();
    return clamp_probability(1.0 - cdf_re_zk(sz, p, alpha) + cdf_re_zk(-sz, p, alpha));
}

double asymptotic_ccdf(double b, const UeLinkParams &p, double alpha)
{
    const auto [l1, l2] = lambda_pair(alpha, p);
    const double cm = gamma_ratio(p.M);
    const double sd = std::sqrt(l1 * (p.M - cm * cm) + 0.5 * l2);
    return q_function((b - cm * std::sqrt(l1)) / sd);
}

double asymptotic_repetition(double rho_beta_tau, double alpha, double eps)
{
    if (!(eps < 0.5 * rho_beta_tau))
        throw std::domain_error("asymptotic_repetition: requires eps < rho beta tau_p / 2");
    const double thr = 0.5 * alpha + eps;
    if (rho_beta_tau < thr)
        return 0.0;
    if (rho_beta_tau > thr)
        return 1.0;
    return 0.5;
}

double pilot_count_pmf(const PilotLoadModel &load, int n)
{
    if (load.K0 < 0 || load.tau_p < 1 || !(load.Pa >= 0.0 && load.Pa <= 1.0))
        throw std::invalid_argument("pilot_count_pmf: invalid load");
    if (n < 0 || n > load.K0)
        throw std::domain_error("pilot_count_pmf: n outside [0, K0]");
    const double p = load.select_probability();
    if (p == 0.0)
        return n == 0 ? 1.0 : 0.0;
    if (p == 1.0)
        return n == load.K0 ? 1.0 : 0.0;
    const double K = load.K0;
    const double lc = std::lgamma(K + 1.0) - std::lgamma(n + 1.0) - std::lgamma(K - n + 1.0);
    return std::exp(lc + n * std::log(p) + (K - n) * std::log1p(-p));
}

double collision_probability(const PilotLoadModel &load)
{
    pilot_count_pmf(load, 0); // validates the load
    const double p = load.select_probability();
    if (load.K0 < 2 || p == 0.0)
        return 0.0;
    if (p == 1.0)
        return 1.0;
    // 1 - (1-p)^(K-1) (1 + (K-1) p) without cancellation at light load
    const double k1 = load.K0 - 1.0;
    return std::clamp(-std::expm1(k1 * std::log1p(-p) + std::log1p(k1 * p)), 0.0, 1.0);
}

int pilot_count_truncation(const PilotLoadModel &load)
{
    double cum = pilot_count_pmf(load, 0);
    int n = 0;
    while (n < load.K0 && cum <= 1.0 - kTruncationMass)
    {
        ++n;
        cum += pilot_count_pmf(load, n);
    }
    return n;
}

double resolved_probability_conditional(const std::map<int, double> &per_size, const PilotLoadModel &load)
{
    const double p0 = pilot_count_pmf(load, 0);
    if (p0 >= 1.0)
        return 0.0;
    const int nmax = pilot_count_truncation(load);
    double num = 0.0, mass = 0.0;
    for (int n = 1; n <= nmax; ++n)
    {
        const double w = pilot_count_pmf(load, n);
        const auto it = per_size.find(n);
        if (it == per_size.end())
            throw std::invalid_argument("resolved_probability_conditional: missing size " + std::to_string(n));
        num += w * it->second;
        mass += w;
    }
    return num / mass;
}

long cdf_clamp_count()
{
    return g_cdf_clamps.load();
}

} // namespace sucre
