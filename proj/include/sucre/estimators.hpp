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

#ifndef SUCRE_ESTIMATORS_HPP
#define SUCRE_ESTIMATORS_HPP

#include "sucre/rng.hpp"

#include <atomic>
#include <string_view>
#include <utility>

namespace sucre
{

// Link constants seen by one contending UE.
struct UeLinkParams
{
    double rho = 1.0;     // UL pilot power
    double beta = 1.0;    // large-scale gain to the serving BS
    int tau_p = 10;       // pilot length
    double q = 1.0;       // DL power
    double sigma2 = 1.0;  // noise power
    double upsilon = 0.0; // DL interference variance
    int M = 100;          // BS antennas

    double gain() const { return rho * beta * tau_p; } // rho beta tau_p, floor of alpha
    void validate() const;
};

enum class EstimatorKind
{
    Approx1,
    Approx2,
    ML
};

std::string_view to_string(EstimatorKind k);

struct AlphaEstimate
{
    double value = 0.0;
    EstimatorKind method = EstimatorKind::Approx2;
    bool degenerate = false; // Re(z) == 0; value is +inf
    bool flagged = false;    // ML refinement did not improve on the grid
};

struct LambdaPair
{
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

// Throws std::domain_error when alpha < rho beta tau_p.
LambdaPair lambda_pair(double alpha, const UeLinkParams &p);

AlphaEstimate estimate_alpha_approx1(double z_re, const UeLinkParams &p);
AlphaEstimate estimate_alpha_approx2(double z_re, const UeLinkParams &p);

// Density of Re(z) given alpha, from the chi-plus-Gaussian decomposition.
double log_pdf_f1(double z_re, double alpha, const UeLinkParams &p);
double pdf_f1(double z_re, double alpha, const UeLinkParams &p);

// Density of Im(z) given alpha: N(0, lambda2 / 2).
double log_pdf_f2(double z_im, double alpha, const UeLinkParams &p);
double pdf_f2(double z_im, double alpha, const UeLinkParams &p);

struct SearchConfig
{
    int grid_points = 200;
    double upper_factor = 1e4; // upper end = upper_factor * (rho beta tau_p + sigma^2 + Upsilon)
    double rel_tol = 1e-4;
};

// Log-grid scan followed by golden-section refinement in log(alpha).
// Throws std::runtime_error if the likelihood is non-finite on the whole grid.
AlphaEstimate estimate_alpha_ml(cdouble z, const UeLinkParams &p, const SearchConfig &search = {});

AlphaEstimate estimate_alpha(EstimatorKind kind, cdouble z, const UeLinkParams &p);

// Process-wide counters for numerical diagnostics.
struct EstimatorDiagnostics
{
    std::atomic<long> ml_flagged{0};
    std::atomic<long> pdf_clamped{0};
};

EstimatorDiagnostics &estimator_diagnostics();

} // namespace sucre

#endif
