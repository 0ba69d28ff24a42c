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

#include "sucre/estimators.hpp"
#include "sucre/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sucre
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

AlphaEstimate approx_common(double z_re, const UeLinkParams &p, double m_factor, EstimatorKind kind)
{
    p.validate();
    AlphaEstimate e;
    e.method = kind;
    if (z_re == 0.0)
    {
        e.degenerate = true;
        e.value = kInf;
        return e;
    }
    const double num = m_factor * p.q * p.rho * p.beta * p.beta * double(p.tau_p) * p.tau_p;
    e.value = std::max(num / (z_re * z_re) - p.sigma2, p.gain());
    return e;
}

double log_likelihood(cdouble z, double alpha, const UeLinkParams &p)
{
    return log_pdf_f1(z.real(), alpha, p) + log_pdf_f2(z.imag(), alpha, p);
}

} // namespace

void UeLinkParams::validate() const
{
    if (!(rho > 0.0 && beta > 0.0 && q > 0.0 && sigma2 > 0.0 && tau_p >= 1 && M >= 1 && upsilon >= 0.0))
        throw std::invalid_argument("UeLinkParams: invalid parameters");
}

std::string_view to_string(EstimatorKind k)
{
    switch (k)
    {
    case EstimatorKind::Approx1:
        return "approx1";
    case EstimatorKind::Approx2:
        return "approx2";
    case EstimatorKind::ML:
        return "ml";
    }
    return "unknown";
}

LambdaPair lambda_pair(double alpha, const UeLinkParams &p)
{
    if (!(alpha >= p.gain()))
        throw std::domain_error("lambda_pair: alpha below rho beta tau_p");
    const double tau = p.tau_p;
    LambdaPair l;
    l.lambda1 = p.rho * p.q * p.beta * p.beta * tau * tau / (alpha + p.sigma2);
    l.lambda2 = p.sigma2 + p.upsilon + p.q * p.beta * tau - l.lambda1;
    return l;
}

AlphaEstimate estimate_alpha_approx1(double z_re, const UeLinkParams &p)
{
    return approx_common(z_re, p, double(p.M), EstimatorKind::Approx1);
}

AlphaEstimate estimate_alpha_approx2(double z_re, const UeLinkParams &p)
{
    const double cm = gamma_ratio(p.M);
    return approx_common(z_re, p, cm * cm, EstimatorKind::Approx2);
}

double log_pdf_f1(double z_re, double alpha, const UeLinkParams &p)
{
    const auto [l1, l2] = lambda_pair(alpha, p);
    const double A = std::sqrt(1.0 / l1 + 1.0 / l2);
    const double B = z_re / (l2 * A);
    const double E = -z_re * z_re / (l1 + l2);
    return std::numbers::ln2 + E - std::lgamma(double(p.M)) - p.M * std::log(l1) -
           0.5 * std::log(std::numbers::pi * l2) + log_lemma_a2(2 * p.M - 1, A, B);
}

double pdf_f1(double z_re, double alpha, const UeLinkParams &p)
{
    const double v = std::exp(log_pdf_f1(z_re, alpha, p));
    if (!(v >= 0.0))
    {
        estimator_diagnostics().pdf_clamped.fetch_add(1, std::memory_order_relaxed);
        return 0.0;
    }
    return v;
}

double log_pdf_f2(double z_im, double alpha, const UeLinkParams &p)
{
    const double l2 = lambda_pair(alpha, p).lambda2;
    return -z_im * z_im / l2 - 0.5 * std::log(std::numbers::pi * l2);
}

double pdf_f2(double z_im, double alpha, const UeLinkParams &p)
{
    return std::exp(log_pdf_f2(z_im, alpha, p));
}

AlphaEstimate estimate_alpha_ml(cdouble z, const UeLinkParams &p, const SearchConfig &search)
{
    p.validate();
    if (search.grid_points < 2 || !(search.upper_factor > 1.0) || !(search.rel_tol > 0.0))
        throw std::invalid_argument("estimate_alpha_ml: invalid search configuration");

    const double lo = p.gain();
    const double hi = search.upper_factor * (p.gain() + p.sigma2 + p.upsilon);
    const double ulo = std::log(lo), uhi = std::log(hi);
    const int n = search.grid_points;
    const double du = (uhi - ulo) / (n - 1);

    // Grid point 0 is evaluated at exactly lo so the floor is attainable.
    auto alpha_at = [&](double u) { return std::max(lo, std::exp(u)); };

    int best = -1;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
    {
        const double a = i == 0 ? lo : alpha_at(ulo + i * du);
        const double ll = log_likelihood(z, a, p);
        if (std::isfinite(ll) && ll > best_ll)
        {
            best_ll = ll;
            best = i;
        }
    }
    if (best < 0)
        throw std::runtime_error("estimate_alpha_ml: likelihood not finite on the search grid");

    double a = ulo + std::max(best - 1, 0) * du;
    double b = ulo + std::min(best + 1, n - 1) * du;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = log_likelihood(z, alpha_at(c), p);
    double fd = log_likelihood(z, alpha_at(d), p);
    while (b - a > search.rel_tol)
    {
        if (fc >= fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = log_likelihood(z, alpha_at(c), p);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = log_likelihood(z, alpha_at(d), p);
        }
    }
    const double u_ref = 0.5 * (a + b);
    const double ll_ref = log_likelihood(z, alpha_at(u_ref), p);

    AlphaEstimate e;
    e.method = EstimatorKind::ML;
    const double grid_alpha = best == 0 ? lo : alpha_at(ulo + best * du);
    if (ll_ref >= best_ll)
    {
        e.value = alpha_at(u_ref);
    }
    else
    {
        e.value = grid_alpha;
        // Refinement losing to the floor point is expected when the
        // maximum sits on the boundary; anywhere else it is worth counting.
        if (best != 0)
        {
            e.flagged = true;
            estimator_diagnostics().ml_flagged.fetch_add(1, std::memory_order_relaxed);
        }
    }
    return e;
}

AlphaEstimate estimate_alpha(EstimatorKind kind, cdouble z, const UeLinkParams &p)
{
    switch (kind)
    {
    case EstimatorKind::Approx1:
        return estimate_alpha_approx1(z.real(), p);
    case EstimatorKind::Approx2:
        return estimate_alpha_approx2(z.real(), p);
    case EstimatorKind::ML:
        return estimate_alpha_ml(z, p);
    }
    throw std::invalid_argument("estimate_alpha: unknown estimator");
}

EstimatorDiagnostics &estimator_diagnostics()
{
    static EstimatorDiagnostics d;
    return d;
}

} // namespace sucre
