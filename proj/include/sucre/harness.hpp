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

#ifndef SUCRE_HARNESS_HPP
#define SUCRE_HARNESS_HPP

#include "sucre/protocol.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sucre
{

enum class ExperimentId
{
    EstimatorCompare,
    TwoUe,
    ResolveVsM,
    BiasSweep,
    Crowded
};

// Accepts the CLI spelling (estimator-compare, two-ue, resolve-vs-m,
// bias-sweep, crowded). Throws std::invalid_argument otherwise.
ExperimentId parse_experiment_id(const std::string &name);
std::string to_string(ExperimentId id);

// Line-oriented "key = value" text; '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;
ConfigMap parse_config(const std::string &text);
ConfigMap load_config_file(const std::string &path);

struct ExperimentSpec
{
    ExperimentId id = ExperimentId::EstimatorCompare;
    std::vector<double> grid; // sweep values
    long trials = 100000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_path;
    ConfigMap options; // experiment-specific knobs, see README

    void validate() const;
};

// Default grid and trial count per experiment, overridden by `cfg`.
ExperimentSpec make_spec(ExperimentId id, const ConfigMap &cfg = {});

struct CsvRow
{
    std::string series;
    double sweep_value = 0.0;
    std::string metric;
    double estimate = 0.0;
    double std_error = 0.0;
    long trials = 0;
    std::optional<double> closed_form;
};

struct ExperimentResult
{
    std::vector<CsvRow> rows;

    const CsvRow *find(const std::string &series, double sweep_value, const std::string &metric) const;
};

ExperimentResult run_experiment(const ExperimentSpec &spec);

std::string to_csv(const ExperimentResult &result);
// Throws std::invalid_argument on an empty result, std::runtime_error on I/O failure.
void emit_csv(const ExperimentResult &result, const std::string &path);
std::vector<CsvRow> parse_csv(const std::string &text);

// Runs body(i) for i in [0, n) on `threads` workers. Each index is visited
// exactly once; the caller reduces results in index order.
void parallel_for(long n, int threads, const std::function<void(long)> &body);

// Mean and standard error of per-trial values, summed in index order.
struct Estimate
{
    double mean = 0.0;
    double std_error = 0.0;
    long n = 0;
};
Estimate summarize(const std::vector<double> &values);
Estimate bernoulli(long successes, long n);

struct ValidationCheck
{
    std::string name;
    double closed_form = 0.0;
    double empirical = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Analytic-versus-simulation cross checks; all must pass for exit code 0.
std::vector<ValidationCheck> run_validation(std::uint64_t seed, long trials, int threads);

} // namespace sucre

#endif
