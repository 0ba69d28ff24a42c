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

#include "sucre/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sucre
{

namespace
{

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 1000000;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Series for P(a,x): exp(-x) x^a / Gamma(a) * sum x^n / (a (a+1) ... (a+n)).
double log_p_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n)
    {
        term *= x / (a + n);
        sum += term;
        if (term < sum * kEps)
            break;
    }
    return -x + a * std::log(x) - std::lgamma(a) + std::log(sum);
}

// Modified Lentz continued fraction for Q(a,x), valid for x >= a + 1.
double log_q_fraction(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i)
    {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            break;
    }
    return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

double log_j0(double B)
{
    return std::log(0.5 * std::sqrt(std::numbers::pi)) + log_erfc(-B);
}

// Accumulates a product of positive factors as a log without a log call per factor.
struct LogProduct
{
    double log_acc = 0.0;
    double prod = 1.0;

    void mul(double f)
    {
        prod *= f;
        if (prod > 1e250 || prod < 1e-250)
        {
            log_acc += std::log(prod);
            prod = 1.0;
        }
    }
    double log() const { return log_acc + std::log(prod); }
};

// Forward recurrence is acceptable for B < 0 while the error growth
// exp(2 sqrt(2) |B| sqrt(m)) stays below about e^8.
bool forward_is_stable(int m, double B)
{
    return B >= 0.0 || 2.0 * std::numbers::sqrt2 * (-B) * std::sqrt(double(m)) <= 8.0;
}

int backward_start(int m, double b)
{
    const double s = std::sqrt(double(m)) + 13.1 / b + 1.0;
    return std::max(m + 2, int(std::ceil(s * s)));
}

// J_m(B) = int_0^inf u^m exp(-(u - B)^2) du satisfies
// J_{k+1} = B J_k + (k/2) J_{k-1}. Ratios r_k = J_k / J_{k-1} are produced for
// k = 1..m and passed to sink(k, r_k). Returns false if the forward pass
// produced a non-positive ratio.
template <class Sink>
bool forward_ratios(int m, double B, double lj0, Sink &&sink)
{
    if (m < 1)
        return true;
    double r = B + std::exp(-B * B - std::numbers::ln2 - lj0);
    if (!(r > 0.0))
        return false;
    sink(1, r);
    for (int k = 1; k < m; ++k)
    {
        r = B + 0.5 * k / r;
        if (!(r > 0.0))
            return false;
        sink(k + 1, r);
    }
    return true;
}

template <class Sink>
void backward_ratios(int m, double b, Sink &&sink)
{
    const int N = backward_start(m, b);
    double r = 0.5 * (-b + std::sqrt(b * b + 2.0 * N));
    for (int k = N - 1; k >= 1; --k)
    {
        r = k / (2.0 * b + 2.0 * r);
        if (k <= m)
            sink(k, r);
    }
}

double log_jm(int m, double B)
{
    const double lj0 = log_j0(B);
    LogProduct acc;
    if (forward_is_stable(m, B))
    {
        bool ok = forward_ratios(m, B, lj0, [&](int, double r) { acc.mul(r); });
        if (ok)
            return lj0 + acc.log();
        acc = LogProduct{};
    }
    backward_ratios(m, -B, [&](int, double r) { acc.mul(r); });
    return lj0 + acc.log();
}

void check_a(double A)
{
    if (!(A > 0.0))
        throw std::domain_error("lemma_a2: A must be positive");
}

} // namespace

double log_gamma(double x)
{
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: argument must be positive");
    return std::lgamma(x);
}

double log_gamma_ratio(int M)
{
    if (M < 1)
        throw std::domain_error("gamma_ratio: M must be >= 1");
    return std::lgamma(M + 0.5) - std::lgamma(double(M));
}

double gamma_ratio(int M)
{
    return std::exp(log_gamma_ratio(M));
}

double log_regularized_gamma_p(double a, double x)
{
    if (!(a > 0.0) || x < 0.0)
        throw std::domain_error("log_regularized_gamma_p: need a > 0, x >= 0");
    if (x == 0.0)
        return kNegInf;
    if (x < a + 1.0)
        return log_p_series(a, x);
    return std::log1p(-std::exp(log_q_fraction(a, x)));
}

double log_regularized_gamma_q(double a, double x)
{
    if (!(a > 0.0) || x < 0.0)
        throw std::domain_error("log_regularized_gamma_q: need a > 0, x >= 0");
    if (x == 0.0)
        return 0.0;
    if (x < a + 1.0)
        return std::log1p(-std::exp(log_p_series(a, x)));
    return log_q_fraction(a, x);
}

double lower_incomplete_gamma(HalfInteger a, double x)
{
    if (a.twice_value < 1)
        throw std::domain_error("lower_incomplete_gamma: order must be positive");
    if (x < 0.0 || std::isnan(x))
        throw std::domain_error("lower_incomplete_gamma: x must be >= 0");
    if (x == 0.0)
        return 0.0;

    const double av = a.value();
    if (x < av)
        return std::exp(std::lgamma(av) + log_p_series(av, x));

    if (a.is_integer())
    {
        const int m = a.twice_value / 2;
        const double lx = std::log(x);
        double tail = 0.0;
        for (int k = 0; k < m; ++k)
            tail += std::exp(-x + k * lx - std::lgamma(k + 1.0));
        return std::exp(std::lgamma(av)) * (1.0 - tail);
    }

    double g = std::sqrt(std::numbers::pi) * std::erf(std::sqrt(x));
    const double lx = std::log(x);
    for (double b = 0.5; b < av; b += 1.0)
        g = b * g - std::exp(b * lx - x);
    return g;
}

double q_function(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double log_erfc(double x)
{
    if (x < 20.0)
        return std::log(std::erfc(x));
    // Asymptotic expansion; at x >= 20 the fifth term is below 1e-16.
    const double t = 1.0 / (2.0 * x * x);
    const double series = 1.0 - t * (1.0 - 3.0 * t * (1.0 - 5.0 * t * (1.0 - 7.0 * t)));
    return -x * x - std::log(x * std::sqrt(std::numbers::pi)) + std::log(series);
}

double SignedLog::value() const
{
    return sign == 0 ? 0.0 : sign * std::exp(log_mag);
}

SignedLog log_sum_signed(std::span<const SignedLog> terms)
{
    if (terms.empty())
        throw std::invalid_argument("log_sum_signed: empty sequence");

    double lmax = kNegInf;
    for (const auto &t : terms)
        if (t.sign != 0)
            lmax = std::max(lmax, t.log_mag);
    if (lmax == kNegInf)
        return {};

    double pos = 0.0, neg = 0.0;
    for (const auto &t : terms)
    {
        if (t.sign > 0)
            pos += std::exp(t.log_mag - lmax);
        else if (t.sign < 0)
            neg += std::exp(t.log_mag - lmax);
    }
    const double diff = pos - neg;
    if (diff == 0.0)
        return {};
    return {diff > 0.0 ? 1 : -1, lmax + std::log(std::fabs(diff))};
}

double lemma_a2_closed_form(int m, double A, double B)
{
    check_a(A);
    if (m < 0)
        throw std::domain_error("lemma_a2: m must be >= 0");

    const double x = B * B;
    const double log_pref = -(m + 1) * std::log(A) - std::numbers::ln2;
    const double lfm = std::lgamma(m + 1.0);
    std::vector<SignedLog> terms;
    terms.reserve(m + 1);

    for (int n = 0; n <= m; ++n)
    {
        const int p = m - n;
        if (p > 0 && B == 0.0)
            continue;
        const double an = 0.5 * (n + 1);
        const double lbin = lfm - std::lgamma(n + 1.0) - std::lgamma(p + 1.0);
        const double lpow = p > 0 ? p * std::log(std::fabs(B)) : 0.0;

        double lg;
        int sign = 1;
        if (B >= 0.0)
        {
            // Gamma(a) + gamma(a, x) for even n, upper Gamma(a, x) for odd n.
            lg = (n % 2 == 0) ? std::lgamma(an) + std::log1p(std::exp(log_regularized_gamma_p(an, x)))
                              : std::lgamma(an) + log_regularized_gamma_q(an, x);
        }
        else
        {
            lg = std::lgamma(an) + log_regularized_gamma_q(an, x);
            sign = (p % 2 == 0) ? 1 : -1;
        }
        terms.push_back({sign, log_pref + lbin + lpow + lg});
    }
    const SignedLog s = log_sum_signed(terms);
    // The integral is positive; a non-positive sum is cancellation noise.
    return s.sign > 0 ? std::exp(s.log_mag) : 0.0;
}

double log_lemma_a2(int m, double A, double B)
{
    check_a(A);
    if (m < 0)
        throw std::domain_error("lemma_a2: m must be >= 0");
    return log_jm(m, B) - (m + 1) * std::log(A);
}

double lemma_a2_integral(int m, double A, double B)
{
    if (B >= 0.0)
        return lemma_a2_closed_form(m, A, B);
    return std::exp(log_lemma_a2(m, A, B));
}

std::vector<double> log_lemma_a2_table(int m_max, double A, double B)
{
    check_a(A);
    if (m_max < 0)
        throw std::domain_error("lemma_a2: m must be >= 0");

    std::vector<double> ratios(m_max + 1, 1.0);
    const double lj0 = log_j0(B);
    bool done = false;
    if (forward_is_stable(m_max, B))
        done = forward_ratios(m_max, B, lj0, [&](int k, double r) { ratios[k] = r; });
    if (!done)
        backward_ratios(m_max, -B, [&](int k, double r) { ratios[k] = r; });

    std::vector<double> out(m_max + 1);
    const double lA = std::log(A);
    double lj = lj0;
    for (int k = 0; k <= m_max; ++k)
    {
        if (k > 0)
            lj += std::log(ratios[k]);
        out[k] = lj - (k + 1) * lA;
    }
    return out;
}

} // namespace sucre
