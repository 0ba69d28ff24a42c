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

#include "sucre/analytics.hpp"
#include "sucre/estimators.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace sucre;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

namespace
{

UeLinkParams unit_link(int M)
{
    UeLinkParams p;
    p.M = M;
    return p; // q = rho beta = sigma^2 = 1, tau_p = 10
}

// Density of Re(z) as the convolution of the scaled chi_{2M} variable with
// the Gaussian part, integrated numerically.
double f1_convolution(double x, double alpha, const UeLinkParams &p)
{
    const auto [l1, l2] = lambda_pair(alpha, p);
    const double s = std::sqrt(0.5 * l1);
    const double M = p.M;
    auto integrand = [&](double g) {
        if (g <= 0.0)
            return 0.0;
        const double u = g / s;
        const double log_chi = (2.0 * M - 1.0) * std::log(u) - 0.5 * u * u - (M - 1.0) * std::numbers::ln2 -
                               std::lgamma(M) - std::log(s);
        const double log_gauss = -(x - g) * (x - g) / l2 - 0.5 * std::log(std::numbers::pi * l2);
        return std::exp(log_chi + log_gauss);
    };
    const double centre = s * std::sqrt(2.0 * M - 1.0);
    const double width = 12.0 * (s + std::sqrt(l2));
    const double lo = std::max(0.0, std::min(centre, x) - width);
    const double hi = std::max(centre, x) + width;
    return GK::integrate(integrand, lo, hi, 25, 1e-13);
}

double nmse(const std::vector<double> &est, double alpha)
{
    double s = 0.0;
    for (double e : est)
        s += (e - alpha) * (e - alpha);
    return s / est.size() / (alpha * alpha);
}

ContentionScenario fig_setting(int M, double alpha)
{
    ContentionScenario s;
    s.contenders = {unit_link(M)};
    s.omega = alpha - s.contenders[0].gain();
    return s;
}

} // namespace

TEST_CASE("lambda_pair - substitution and limits")
{
    const auto p = unit_link(100);
    const auto a = lambda_pair(10.0, p);
    CHECK_THAT(a.lambda1, WithinRel(100.0 / 11.0, 1e-14));
    CHECK_THAT(a.lambda2, WithinRel(11.0 - 100.0 / 11.0, 1e-14));
    const auto b = lambda_pair(20.0, p);
    CHECK_THAT(b.lambda1, WithinRel(100.0 / 21.0, 1e-14));
    CHECK_THAT(b.lambda2, WithinRel(11.0 - 100.0 / 21.0, 1e-14));
    const auto c = lambda_pair(1e12, p);
    CHECK(c.lambda1 < 1e-9);
    CHECK_THAT(c.lambda2, WithinRel(11.0, 1e-9));
    CHECK_THROWS_AS(lambda_pair(9.999, p), std::domain_error);
}

TEST_CASE("approx estimators - floor, inversion and degenerate input")
{
    const auto p = unit_link(100);
    CHECK(estimate_alpha_approx1(1e12, p).value == p.gain());
    CHECK(estimate_alpha_approx2(1e12, p).value == p.gain());

    const double z = std::sqrt(100.0 * 100.0 / 21.0);
    CHECK_THAT(estimate_alpha_approx1(z, p).value, WithinRel(20.0, 1e-13));
    CHECK_THAT(estimate_alpha_approx1(-z, p).value, WithinRel(20.0, 1e-13));

    const auto d = estimate_alpha_approx1(0.0, p);
    CHECK(d.degenerate);
    CHECK(d.value == std::numeric_limits<double>::infinity());
    CHECK(estimate_alpha_approx2(0.0, p).degenerate);
}

TEST_CASE("approx2 - M=1 ratio to approx1")
{
    const auto p = unit_link(1);
    for (double z : {0.3, 0.9, 1.7})
    {
        const double a1 = estimate_alpha_approx1(z, p).value + p.sigma2;
        const double a2 = estimate_alpha_approx2(z, p).value + p.sigma2;
        CHECK_THAT(a2 / a1, WithinRel(std::numbers::pi / 4.0, 1e-13));
    }
}

TEST_CASE("approx estimators - unbiased at large M")
{
    Rng rng(31);
    const auto s = fig_setting(500, 20.0);
    double m1 = 0.0, m2 = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
    {
        const cdouble z = sample_zk(s, 0, rng);
        m1 += estimate_alpha_approx1(z.real(), s.contenders[0]).value;
        m2 += estimate_alpha_approx2(z.real(), s.contenders[0]).value;
    }
    CHECK_THAT(m1 / n, WithinRel(20.0, 0.05));
    CHECK_THAT(m2 / n, WithinRel(20.0, 0.05));
}

TEST_CASE("estimators - floor holds for every draw")
{
    Rng rng(32);
    for (int M : {1, 10, 100})
    {
        const auto s = fig_setting(M, 20.0);
        const auto &p = s.contenders[0];
        for (int i = 0; i < 300; ++i)
        {
            const cdouble z = sample_zk(s, 0, rng);
            for (auto k : {EstimatorKind::Approx1, EstimatorKind::Approx2, EstimatorKind::ML})
                REQUIRE(estimate_alpha(k, z, p).value >= p.gain());
        }
    }
}

TEST_CASE("estimators - approx1 and approx2 merge at M=1000")
{
    Rng rng(33);
    const auto s = fig_setting(1000, 20.0);
    for (int i = 0; i < 200; ++i)
    {
        const double z = sample_zk(s, 0, rng).real();
        const double a1 = estimate_alpha_approx1(z, s.contenders[0]).value;
        const double a2 = estimate_alpha_approx2(z, s.contenders[0]).value;
        CHECK(std::abs(a1 - a2) / a2 < 1e-3);
    }
}

TEST_CASE("estimators - joint rescaling leaves alpha over gain invariant")
{
    Rng rng(34);
    const auto s = fig_setting(30, 25.0);
    const auto p = s.contenders[0];
    for (double c : {0.01, 3.0, 250.0})
    {
        UeLinkParams ps = p;
        ps.q *= c;
        ps.sigma2 *= c;
        ps.upsilon *= c;
        ps.rho *= c;
        for (int i = 0; i < 20; ++i)
        {
            const cdouble z = sample_zk(s, 0, rng);
            const cdouble zs = z * std::sqrt(c);
            for (auto k : {EstimatorKind::Approx1, EstimatorKind::Approx2})
                CHECK_THAT(estimate_alpha(k, zs, ps).value / ps.gain(),
                           WithinRel(estimate_alpha(k, z, p).value / p.gain(), 1e-12));
            CHECK_THAT(estimate_alpha_ml(zs, ps).value / ps.gain(),
                       WithinRel(estimate_alpha_ml(z, p).value / p.gain(), 2e-4));
        }
    }
}

TEST_CASE("pdf_f1 - normalization")
{
    for (int M : {1, 10, 100})
    {
        const auto p = unit_link(M);
        auto f = [&](double x) { return pdf_f1(x, 20.0, p); };
        const double centre = std::sqrt(lambda_pair(20.0, p).lambda1 * M);
        const double total =
            GK::integrate(f, -std::numeric_limits<double>::infinity(), centre, 20, 1e-12) +
            GK::integrate(f, centre, std::numeric_limits<double>::infinity(), 20, 1e-12);
        INFO("M=" << M);
        CHECK_THAT(total, WithinAbs(1.0, 1e-6));
    }
}

TEST_CASE("pdf_f1 - convolution oracle")
{
    for (int M : {1, 4, 50, 300})
        for (double alpha : {10.0, 20.0, 80.0})
        {
            const auto p = unit_link(M);
            const auto [l1, l2] = lambda_pair(alpha, p);
            const double mu = std::sqrt(l1 * M);
            const double sd = std::sqrt(0.5 * l1 + 0.5 * l2 + 1.0);
            for (int k = 0; k < 50; ++k)
            {
                const double x = mu + sd * (-7.0 + 14.0 * k / 49.0);
                INFO("M=" << M << " alpha=" << alpha << " x=" << x);
                CHECK_THAT(pdf_f1(x, alpha, p), WithinAbs(f1_convolution(x, alpha, p), 1e-6));
            }
        }
}

TEST_CASE("pdf_f1 - M=1 spot value at zero")
{
    const auto p = unit_link(1);
    CHECK_THAT(pdf_f1(0.0, 20.0, p), WithinRel(f1_convolution(0.0, 20.0, p), 1e-9));
}

TEST_CASE("pdf_f1 - far tails stay finite")
{
    const auto p = unit_link(500);
    for (double x : {-200.0, -40.0, 0.0, 300.0, 2000.0})
    {
        const double l = log_pdf_f1(x, 20.0, p);
        CHECK(std::isfinite(l));
        CHECK(pdf_f1(x, 20.0, p) >= 0.0);
    }
}

TEST_CASE("pdf_f2 - gaussian shape")
{
    const auto p = unit_link(10);
    const double l2 = lambda_pair(20.0, p).lambda2;
    CHECK_THAT(pdf_f2(0.0, 20.0, p), WithinRel(1.0 / std::sqrt(std::numbers::pi * l2), 1e-14));
    for (double x : {0.3, 1.2, 4.0})
        CHECK(pdf_f2(x, 20.0, p) == pdf_f2(-x, 20.0, p));
    auto f = [&](double x) { return pdf_f2(x, 20.0, p); };
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THAT(GK::integrate(f, -inf, inf, 20, 1e-12), WithinAbs(1.0, 1e-9));
}

TEST_CASE("likelihood - true alpha beats twice alpha on average")
{
    Rng rng(35);
    const auto s = fig_setting(100, 20.0);
    const auto &p = s.contenders[0];
    double at_true = 0.0, at_double = 0.0;
    for (int i = 0; i < 1000; ++i)
    {
        const cdouble z = sample_zk(s, 0, rng);
        at_true += log_pdf_f1(z.real(), 20.0, p) + log_pdf_f2(z.imag(), 20.0, p);
        at_double += log_pdf_f1(z.real(), 40.0, p) + log_pdf_f2(z.imag(), 40.0, p);
    }
    CHECK(at_true > at_double);
}

TEST_CASE("ML - NMSE no worse than approx2 at M=200")
{
    Rng rng(36);
    const auto s = fig_setting(200, 20.0);
    std::vector<double> ml, a2;
    for (int i = 0; i < 1000; ++i)
    {
        const cdouble z = sample_zk(s, 0, rng);
        ml.push_back(estimate_alpha_ml(z, s.contenders[0]).value);
        a2.push_back(estimate_alpha_approx2(z.real(), s.contenders[0]).value);
    }
    CHECK(nmse(ml, 20.0) <= nmse(a2, 20.0) + 0.01);
}

TEST_CASE("ML - floor attraction for a lone contender")
{
    Rng rng(37);
    const auto s = fig_setting(100, 10.0); // alpha equals the UE's own gain
    std::vector<double> est;
    for (int i = 0; i < 200; ++i)
        est.push_back(estimate_alpha_ml(sample_zk(s, 0, rng), s.contenders[0]).value);
    std::sort(est.begin(), est.end());
    CHECK(est[100] <= 1.1 * s.contenders[0].gain());
}

TEST_CASE("ML - refinement agrees with a dense grid")
{
    Rng rng(38);
    std::uniform_int_distribution<int> um(0, 3);
    const int Ms[] = {5, 20, 100, 400};
    std::uniform_real_distribution<double> ua(10.0, 200.0);
    for (int i = 0; i < 100; ++i)
    {
        const int M = Ms[um(rng)];
        const auto s = fig_setting(M, ua(rng));
        const auto &p = s.contenders[0];
        const cdouble z = sample_zk(s, 0, rng);
        const double est = estimate_alpha_ml(z, p).value;

        const double lo = p.gain(), hi = 1e4 * (p.gain() + p.sigma2 + p.upsilon);
        const int n = 20000;
        double best = lo, best_ll = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k)
        {
            const double a = lo * std::pow(hi / lo, double(k) / (n - 1));
            const double ll = log_pdf_f1(z.real(), a, p) + log_pdf_f2(z.imag(), a, p);
            if (ll > best_ll)
            {
                best_ll = ll;
                best = a;
            }
        }
        INFO("M=" << M << " z=" << z << " grid=" << best << " ml=" << est);
        CHECK_THAT(est, WithinRel(best, 1e-3));
    }
}

TEST_CASE("ML - invalid search configuration")
{
    const auto p = unit_link(10);
    SearchConfig bad;
    bad.grid_points = 1;
    CHECK_THROWS_AS(estimate_alpha_ml({1.0, 0.0}, p, bad), std::invalid_argument);
}

TEST_CASE("UeLinkParams - validation")
{
    UeLinkParams p;
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.upsilon = -1.0;
    CHECK_THROWS_AS(estimate_alpha_approx1(1.0, p), std::invalid_argument);
}
