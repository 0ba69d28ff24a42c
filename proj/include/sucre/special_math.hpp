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

#ifndef SUCRE_SPECIAL_MATH_HPP
#define SUCRE_SPECIAL_MATH_HPP

#include <span>
#include <vector>

namespace sucre
{

// a = twice_value / 2
struct HalfInteger
{
    int twice_value = 1;

    double value() const { return 0.5 * twice_value; }
    bool is_integer() const { return twice_value % 2 == 0; }
};

// ln Gamma(x), x > 0. Throws std::domain_error otherwise.
double log_gamma(double x);

// C_M = Gamma(M + 1/2) / Gamma(M)
double gamma_ratio(int M);
double log_gamma_ratio(int M);

// Lower incomplete gamma gamma(a, x) for half-integer order.
// Uses the finite-sum form (integer a) or the erf base case with upward
// recurrence (half-integer a) where those are stable (x >= a); the power
// series otherwise.
double lower_incomplete_gamma(HalfInteger a, double x);

// Logarithms of the regularized incomplete gamma functions P(a,x), Q(a,x)
// for real a > 0, x >= 0.
double log_regularized_gamma_p(double a, double x);
double log_regularized_gamma_q(double a, double x);

// Gaussian tail probability.
double q_function(double x);

// ln erfc(x), finite for all finite x.
double log_erfc(double x);

// A signed number stored as sign * exp(log_mag). sign == 0 means exact zero.
struct SignedLog
{
    int sign = 0;
    double log_mag = 0.0;

    bool is_zero() const { return sign == 0; }
    double value() const;
};

// Sum of signed log-magnitude terms with a max shift. Throws
// std::invalid_argument on an empty sequence.
SignedLog log_sum_signed(std::span<const SignedLog> terms);

// I_m(A, B) = int_0^inf x^m exp(-(xA - B)^2) dx.
//
// lemma_a2_closed_form evaluates the binomial expansion over incomplete
// gamma functions term by term. For B < 0 the terms alternate and lose
// relative accuracy roughly in proportion to exp(B^2); the recurrence route
// below does not.
double lemma_a2_closed_form(int m, double A, double B);

// Stable evaluation: closed form for B >= 0, three-term recurrence for B < 0.
double lemma_a2_integral(int m, double A, double B);

// ln I_m(A, B) via the three-term recurrence, O(m) work.
double log_lemma_a2(int m, double A, double B);

// ln I_0 .. ln I_{m_max} in one pass.
std::vector<double> log_lemma_a2_table(int m_max, double A, double B);

} // namespace sucre

#endif
