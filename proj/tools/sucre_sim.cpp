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

#include "sucre/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace
{

struct CommonOpts
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::optional<int> threads;
    std::string out;
    std::vector<std::string> sets;
};

void add_common(CLI::App *cmd, CommonOpts &o)
{
    cmd->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--trials", o.trials, "trials per sweep point")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "CSV output path (stdout if omitted)");
    cmd->add_option("--set", o.sets, "override a config key, e.g. --set grid=1,10,100");
}

int run_one(sucre::ExperimentId id, const CommonOpts &o)
{
    sucre::ConfigMap cfg;
    if (!o.config.empty())
        cfg = sucre::load_config_file(o.config);
    for (const auto &kv : o.sets)
    {
        const auto parsed = sucre::parse_config(kv);
        for (const auto &[k, v] : parsed)
            cfg[k] = v;
    }
    sucre::ExperimentSpec spec = sucre::make_spec(id, cfg);
    if (o.seed)
        spec.seed = *o.seed;
    if (o.trials)
        spec.trials = *o.trials;
    if (o.threads)
        spec.threads = *o.threads;
    if (!o.out.empty())
        spec.out_path = o.out;

    const sucre::ExperimentResult res = sucre::run_experiment(spec);
    if (spec.out_path.empty())
        std::cout << sucre::to_csv(res);
    else
        sucre::emit_csv(res, spec.out_path);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Monte-Carlo and analytic experiments for strongest-user collision resolution"};
    app.require_subcommand(1);

    const char *names[] = {"estimator-compare", "two-ue", "resolve-vs-m", "bias-sweep", "crowded"};
    const char *help[] = {"bias and NMSE of the three path-gain estimators versus M",
                          "repeat probabilities of two contenders versus their SNR gap",
                          "resolution probability versus antenna count per channel model",
                          "resolved / false-negative / false-positive rates versus the bias knob",
                          "multi-block crowded scenario with retransmissions"};
    std::vector<CommonOpts> opts(std::size(names));
    std::vector<CLI::App *> cmds;
    for (std::size_t i = 0; i < std::size(names); ++i)
    {
        auto *c = app.add_subcommand(names[i], help[i]);
        add_common(c, opts[i]);
        cmds.push_back(c);
    }

    std::uint64_t vseed = 1;
    long vtrials = 20000;
    int vthreads = 1;
    auto *val = app.add_subcommand("validate", "closed-form versus simulation cross checks");
    val->add_option("--seed", vseed, "master seed");
    val->add_option("--trials", vtrials, "trials per check")->check(CLI::PositiveNumber);
    val->add_option("--threads", vthreads, "worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        for (std::size_t i = 0; i < cmds.size(); ++i)
            if (cmds[i]->parsed())
                return run_one(sucre::parse_experiment_id(names[i]), opts[i]);

        if (val->parsed())
        {
            bool ok = true;
            for (const auto &c : sucre::run_validation(vseed, vtrials, vthreads))
            {
                std::printf("%s  %-40s closed=%.6g empirical=%.6g tol=%.3g\n", c.pass ? "PASS" : "FAIL",
                            c.name.c_str(), c.closed_form, c.empirical, c.tolerance);
                ok = ok && c.pass;
            }
            return ok ? 0 : 1;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
