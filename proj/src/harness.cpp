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
#include "sucre/special_math.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sucre
{

namespace
{

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

double to_double(const std::string &s, const std::string &what)
{
    std::size_t pos = 0;
    double v = 0.0;
    try
    {
        v = std::stod(s, &pos);
    }
    catch (const std::exception &)
    {
        throw std::invalid_argument("invalid number for " + what + ": '" + s + "'");
    }
    if (pos != s.size())
        throw std::invalid_argument("invalid number for " + what + ": '" + s + "'");
    return v;
}

std::vector<double> to_double_list(const std::string &s, const std::string &what)
{
    std::vector<double> out;
    for (const auto &item : split(s, ','))
        out.push_back(to_double(item, what));
    return out;
}

std::string opt(const ExperimentSpec &spec, const std::string &key, const std::string &def)
{
    const auto it = spec.options.find(key);
    return it == spec.options.end() ? def : it->second;
}

double opt_num(const ExperimentSpec &spec, const std::string &key, double def)
{
    const auto it = spec.options.find(key);
    return it == spec.options.end() ? def : to_double(it->second, key);
}

bool opt_bool(const ExperimentSpec &spec, const std::string &key, bool def)
{
    const std::string v = opt(spec, key, def ? "true" : "false");
    if (v == "true" || v == "on" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "off" || v == "0" || v == "no")
        return false;
    throw std::invalid_argument("invalid boolean for " + key + ": '" + v + "'");
}

BiasScale parse_bias_scale(const std::string &s)
{
    if (s == "pilot_gain")
        return BiasScale::PilotGain;
    if (s == "bare_gain")
        return BiasScale::BareGain;
    throw std::invalid_argument("unknown bias_scale '" + s + "'");
}

EstimatorKind parse_estimator(const std::string &s)
{
    if (s == "approx1")
        return EstimatorKind::Approx1;
    if (s == "approx2")
        return EstimatorKind::Approx2;
    if (s == "ml")
        return EstimatorKind::ML;
    throw std::invalid_argument("unknown estimator '" + s + "'");
}

// Channel/power case names used by resolve-vs-m.
void apply_case(RaBlockConfig &cfg, const std::string &name)
{
    if (name == "uncorrelated")
    {
        cfg.channel = {ChannelKind::UncorrelatedRayleigh, 0.0};
        cfg.large_scale = LargeScaleModel::non_los();
    }
    else if (name == "correlated")
    {
        cfg.channel = {ChannelKind::CorrelatedRayleigh, 0.7};
        cfg.large_scale = LargeScaleModel::non_los();
    }
    else if (name == "los")
    {
        cfg.channel = {ChannelKind::LosUla, 0.0};
        cfg.large_scale = LargeScaleModel::los();
    }
    else if (name == "los_random")
    {
        cfg.channel = {ChannelKind::LosUla, 0.0};
        cfg.large_scale = LargeScaleModel::los();
        cfg.power = PowerPolicy::Randomized;
    }
    else
        throw std::invalid_argument("unknown channel case '" + name + "'");
}

std::uint64_t stream_tag(ExperimentId id, int series, int point)
{
    return (std::uint64_t(id) << 48) ^ (std::uint64_t(series) << 24) ^ std::uint64_t(point);
}

std::vector<bool> interference_flags(const ExperimentSpec &spec)
{
    std::vector<bool> out;
    for (const auto &s : split(opt(spec, "interference", "off"), ','))
        out.push_back(s == "on");
    return out;
}

CsvRow row(std::string series, double x, std::string metric, const Estimate &e, std::optional<double> closed = {})
{
    return CsvRow{std::move(series), x, std::move(metric), e.mean, e.std_error, e.n, closed};
}

// ---------------------------------------------------------------- experiments

ExperimentResult run_estimator_compare(const ExperimentSpec &spec)
{
    const double alpha = opt_num(spec, "alpha", 20.0);
    const double own_gain = opt_num(spec, "own_gain", 10.0);
    std::vector<EstimatorKind> kinds;
    for (const auto &s : split(opt(spec, "estimators", "approx1,approx2,ml"), ','))
        kinds.push_back(parse_estimator(s));
    if (!(alpha >= own_gain) || !(own_gain > 0.0))
        throw std::invalid_argument("estimator-compare: need alpha >= own_gain > 0");

    ExperimentResult res;
    for (std::size_t pi = 0; pi < spec.grid.size(); ++pi)
    {
        RaBlockConfig cfg;
        cfg.M = int(spec.grid[pi]);
        cfg.tau_p = int(opt_num(spec, "tau_p", 10));
        cfg.load.tau_p = cfg.tau_p;
        // UE of interest plus one UE carrying the rest of alpha.
        std::vector<ContenderState> cs{{own_gain / cfg.tau_p, 1.0, 0.0, 0.0}};
        if (alpha > own_gain)
            cs.push_back({(alpha - own_gain) / cfg.tau_p, 1.0, 0.0, 0.0});
        const UeLinkParams p = link_params(cfg, cs[0]);

        std::vector<std::vector<double>> est(kinds.size(), std::vector<double>(spec.trials));
        parallel_for(spec.trials, spec.threads, [&](long i) {
            Rng rng = make_substream(spec.seed, stream_tag(spec.id, 0, int(pi)), i);
            const PilotSignals sig = receive_pilot(cfg, cs, nullptr, rng);
            const cdouble z = precoded_response(cfg, cs, sig, rng)[0];
            for (std::size_t k = 0; k < kinds.size(); ++k)
                est[k][i] = estimate_alpha(kinds[k], z, p).value;
        });

        for (std::size_t k = 0; k < kinds.size(); ++k)
        {
            std::vector<double> rel(spec.trials), sq(spec.trials), sqa(spec.trials), val(spec.trials);
            for (long i = 0; i < spec.trials; ++i)
            {
                const double e = est[k][i] - alpha;
                val[i] = est[k][i];
                rel[i] = e / alpha;
                sq[i] = e * e / (alpha * alpha);
                sqa[i] = e * e / alpha;
            }
            const std::string s(to_string(kinds[k]));
            res.rows.push_back(row(s, spec.grid[pi], "mean_estimate", summarize(val)));
            res.rows.push_back(row(s, spec.grid[pi], "bias", summarize(rel)));
            res.rows.push_back(row(s, spec.grid[pi], "nmse", summarize(sq)));
            res.rows.push_back(row(s, spec.grid[pi], "mse_over_alpha", summarize(sqa)));
        }
    }
    return res;
}

ExperimentResult run_two_ue(const ExperimentSpec &spec)
{
    const auto m_values = to_double_list(opt(spec, "m_values", "100,300,500"), "m_values");
    const double snr1_db = opt_num(spec, "snr1_db", 10.0);
    const double eps = opt_num(spec, "bias", 0.0);
    ExperimentResult res;

    for (std::size_t si = 0; si < m_values.size(); ++si)
    {
        RaBlockConfig cfg;
        cfg.M = int(m_values[si]);
        const std::string series = "M=" + std::to_string(cfg.M);
        for (std::size_t pi = 0; pi < spec.grid.size(); ++pi)
        {
            const double g1 = std::pow(10.0, snr1_db / 10.0);
            const double g2 = std::pow(10.0, (snr1_db + spec.grid[pi]) / 10.0);
            const std::vector<ContenderState> cs{{g1 / cfg.tau_p, 1.0, 0.0, 0.0}, {g2 / cfg.tau_p, 1.0, 0.0, 0.0}};
            cfg.bias = {};
            // The constant bias is injected through omega_bar = -2 eps.
            cfg.bias.omega_bar = -2.0 * eps;

            std::vector<unsigned char> r1(spec.trials), r2(spec.trials);
            parallel_for(spec.trials, spec.threads, [&](long i) {
                Rng rng = make_substream(spec.seed, stream_tag(spec.id, int(si), int(pi)), i);
                const auto d = contend_on_pilot(cfg, cs, nullptr, rng);
                r1[i] = d[0] == Decision::Repeat;
                r2[i] = d[1] == Decision::Repeat;
            });
            long n1 = 0, n2 = 0, one = 0;
            for (long i = 0; i < spec.trials; ++i)
            {
                n1 += r1[i];
                n2 += r2[i];
                one += (r1[i] + r2[i]) == 1;
            }

            ContentionScenario sc;
            sc.contenders = {link_params(cfg, cs[0]), link_params(cfg, cs[1])};
            sc.bias = {eps, eps};
            res.rows.push_back(row(series, spec.grid[pi], "repeat_ue1", bernoulli(n1, spec.trials),
                                   repetition_probability(sc, 0)));
            res.rows.push_back(row(series, spec.grid[pi], "repeat_ue2", bernoulli(n2, spec.trials),
                                   repetition_probability(sc, 1)));
            res.rows.push_back(row(series, spec.grid[pi], "unresolved", bernoulli(spec.trials - one, spec.trials)));
        }
    }
    return res;
}

ExperimentResult run_resolve_vs_m(const ExperimentSpec &spec)
{
    const auto cases = split(opt(spec, "cases", "uncorrelated,correlated,los,los_random"), ',');
    const auto interf = interference_flags(spec);
    const long omega_trials = long(opt_num(spec, "omega_trials", 10000));
    const bool with_baseline = opt_bool(spec, "baseline", true);
    ExperimentResult res;

    int si = 0;
    for (const auto &cname : cases)
    {
        for (bool on : interf)
        {
            const std::string series = cname + (on ? "/interference" : "/silent");
            for (std::size_t pi = 0; pi < spec.grid.size(); ++pi)
            {
                RaBlockConfig cfg;
                apply_case(cfg, cname);
                cfg.M = int(spec.grid[pi]);
                cfg.load = {int(opt_num(spec, "K0", 5000)), opt_num(spec, "Pa", 0.005), cfg.tau_p};
                cfg.interference = on;
                cfg.bias.delta = opt_num(spec, "delta", 0.0);
                cfg.bias.scale = parse_bias_scale(opt(spec, "bias_scale", "pilot_gain"));
                if (on)
                {
                    Rng orng = make_substream(spec.seed, stream_tag(spec.id, si, int(pi)) ^ (1ull << 63), 0);
                    cfg.bias.omega_bar = calibrate_omega_bar(cfg, int(omega_trials), orng);
                }

                std::vector<int> used(spec.trials), adm(spec.trials), bused(spec.trials), badm(spec.trials);
                parallel_for(spec.trials, spec.threads, [&](long i) {
                    Rng rng = make_substream(spec.seed, stream_tag(spec.id, si, int(pi)), i);
                    for (const auto &o : run_ra_block(cfg, rng))
                    {
                        used[i] += o.contenders > 0;
                        adm[i] += o.contenders > 0 && o.admitted();
                    }
                    if (with_baseline)
                    {
                        Rng brng = make_substream(spec.seed, stream_tag(spec.id, si, int(pi)) ^ (1ull << 62), i);
                        for (const auto &o : run_baseline_block(cfg, brng))
                        {
                            bused[i] += o.contenders > 0;
                            badm[i] += o.contenders > 0 && o.admitted();
                        }
                    }
                });
                long U = 0, A = 0, BU = 0, BA = 0;
                std::vector<double> per_pilot(spec.trials), bper_pilot(spec.trials);
                for (long i = 0; i < spec.trials; ++i)
                {
                    U += used[i];
                    A += adm[i];
                    BU += bused[i];
                    BA += badm[i];
                    per_pilot[i] = double(adm[i]) / cfg.tau_p;
                    bper_pilot[i] = double(badm[i]) / cfg.tau_p;
                }
                const double x = spec.grid[pi];
                Estimate pr = bernoulli(A, U);
                res.rows.push_back(row(series, x, "p_resolved", pr));
                res.rows.push_back(row(series, x, "admitted_per_pilot", summarize(per_pilot)));
                if (on)
                    res.rows.push_back(CsvRow{series, x, "omega_bar", cfg.bias.omega_bar, 0.0, omega_trials, {}});
                if (with_baseline)
                {
                    const double p0 = pilot_count_pmf(cfg.load, 0);
                    const double p1 = pilot_count_pmf(cfg.load, 1);
                    res.rows.push_back(row(series, x, "baseline_p_resolved", bernoulli(BA, BU), p1 / (1.0 - p0)));
                    res.rows.push_back(row(series, x, "baseline_admitted_per_pilot", summarize(bper_pilot), p1));
                    const Estimate s = summarize(per_pilot), b = summarize(bper_pilot);
                    Estimate ratio;
                    ratio.n = spec.trials;
                    ratio.mean = b.mean > 0.0 ? s.mean / b.mean : 0.0;
                    // delta-method error of a ratio of independent means
                    ratio.std_error = b.mean > 0.0 ? ratio.mean * std::sqrt(std::pow(s.std_error / s.mean, 2) +
                                                                            std::pow(b.std_error / b.mean, 2))
                                                   : 0.0;
                    res.rows.push_back(row(series, x, "sucre_baseline_ratio", ratio));
                }
            }
            ++si;
        }
    }
    return res;
}

ExperimentResult run_bias_sweep(const ExperimentSpec &spec)
{
    const auto interf = interference_flags(spec);
    const auto sizes = split(opt(spec, "sizes", "2,5,10,load"), ',');
    const long omega_trials = long(opt_num(spec, "omega_trials", 10000));
    ExperimentResult res;

    int si = 0;
    for (bool on : interf)
    {
        RaBlockConfig base;
        base.M = int(opt_num(spec, "M", 100));
        base.load = {int(opt_num(spec, "K0", 5000)), opt_num(spec, "Pa", 0.005), base.tau_p};
        base.interference = on;
        base.bias.scale = parse_bias_scale(opt(spec, "bias_scale", "pilot_gain"));
        if (on)
        {
            Rng orng = make_substream(spec.seed, stream_tag(spec.id, 999, 0) ^ (1ull << 63), 0);
            base.bias.omega_bar = calibrate_omega_bar(base, int(omega_trials), orng);
        }
        for (const auto &size : sizes)
        {
            const bool load = size == "load";
            const int N = load ? 0 : int(to_double(size, "sizes"));
            const std::string series = (load ? std::string("load") : "N=" + size) + (on ? "/interference" : "/silent");
            for (std::size_t pi = 0; pi < spec.grid.size(); ++pi)
            {
                RaBlockConfig cfg = base;
                cfg.bias.delta = spec.grid[pi];
                // counts of resolved / false negative / false positive / considered pilots
                std::vector<std::array<int, 4>> tally(spec.trials, std::array<int, 4>{});
                parallel_for(spec.trials, spec.threads, [&](long i) {
                    Rng rng = make_substream(spec.seed, stream_tag(spec.id, si, int(pi)), i);
                    auto count = [&](const PilotOutcome &o) {
                        if (o.contenders == 0)
                            return;
                        tally[i][3] += 1;
                        tally[i][0] += o.admitted();
                        tally[i][1] += o.cls == OutcomeClass::FalseNegative;
                        tally[i][2] += o.cls == OutcomeClass::FalsePositive;
                    };
                    if (load)
                    {
                        for (const auto &o : run_ra_block(cfg, rng))
                            count(o);
                        return;
                    }
                    std::vector<BlockContender> bc(N);
                    for (auto &c : bc)
                        c.link = drop_ue_link(cfg.geometry, cfg.large_scale, 0, rng);
                    count(resolve_block(cfg, bc, ProtocolKind::Sucre, rng).pilots[0]);
                });
                long R = 0, FN = 0, FP = 0, U = 0;
                for (const auto &t : tally)
                {
                    R += t[0];
                    FN += t[1];
                    FP += t[2];
                    U += t[3];
                }
                const double x = spec.grid[pi];
                res.rows.push_back(row(series, x, "resolved", bernoulli(R, U)));
                res.rows.push_back(row(series, x, "false_negative", bernoulli(FN, U)));
                res.rows.push_back(row(series, x, "false_positive", bernoulli(FP, U)));
            }
            ++si;
        }
    }
    return res;
}

ExperimentResult run_crowded(const ExperimentSpec &spec)
{
    const auto interf = interference_flags(spec);
    const auto protocols = split(opt(spec, "protocols", "sucre,baseline"), ',');
    CrowdedConfig crowd;
    crowd.warmup_blocks = int(opt_num(spec, "warmup_blocks", crowd.warmup_blocks));
    crowd.cohort_blocks = int(opt_num(spec, "cohort_blocks", crowd.cohort_blocks));
    crowd.activation = opt_num(spec, "activation", crowd.activation);
    crowd.rejoin = opt_num(spec, "rejoin", crowd.rejoin);
    crowd.max_attempts = int(opt_num(spec, "max_attempts", crowd.max_attempts));
    crowd.redraw_link = opt_bool(spec, "redraw_link", crowd.redraw_link);
    const long omega_trials = long(opt_num(spec, "omega_trials", 10000));
    ExperimentResult res;

    int si = 0;
    for (const auto &pname : protocols)
    {
        const ProtocolKind kind = pname == "baseline" ? ProtocolKind::Baseline : ProtocolKind::Sucre;
        if (pname != "baseline" && pname != "sucre")
            throw std::invalid_argument("unknown protocol '" + pname + "'");
        for (bool on : interf)
        {
            // The baseline ignores channels, so interference does not change it.
            if (kind == ProtocolKind::Baseline && on && interf.size() > 1)
                continue;
            const std::string series =
                pname + (kind == ProtocolKind::Baseline ? std::string() : (on ? "/interference" : "/silent"));
            RaBlockConfig base;
            base.M = int(opt_num(spec, "M", 100));
            base.interference = on && kind == ProtocolKind::Sucre;
            base.bias.delta = opt_num(spec, "delta", -1.0);
            base.bias.scale = parse_bias_scale(opt(spec, "bias_scale", "pilot_gain"));
            if (base.interference)
            {
                Rng orng = make_substream(spec.seed, stream_tag(spec.id, si, 0) ^ (1ull << 63), 0);
                base.bias.omega_bar = calibrate_omega_bar(base, int(omega_trials), orng);
            }
            for (std::size_t pi = 0; pi < spec.grid.size(); ++pi)
            {
                RaBlockConfig cfg = base;
                cfg.load.K0 = int(spec.grid[pi]);
                std::vector<CrowdedStats> reps(spec.trials);
                parallel_for(spec.trials, spec.threads, [&](long i) {
                    Rng rng = make_substream(spec.seed, stream_tag(spec.id, si, int(pi)), i);
                    reps[i] = run_crowded_scenario(cfg, crowd, kind, rng);
                });
                CrowdedStats tot;
                for (const auto &r : reps)
                {
                    tot.cohort += r.cohort;
                    tot.successes += r.successes;
                    tot.failures += r.failures;
                    tot.attempts_total += r.attempts_total;
                    tot.attempts_sq_total += r.attempts_sq_total;
                }
                const double x = spec.grid[pi];
                res.rows.push_back(row(series, x, "success_fraction", bernoulli(tot.successes, tot.cohort)));
                res.rows.push_back(row(series, x, "failure_fraction", bernoulli(tot.failures, tot.cohort)));
                Estimate att;
                att.n = tot.cohort;
                if (tot.cohort > 0)
                {
                    att.mean = tot.mean_attempts();
                    const double var = double(tot.attempts_sq_total) / tot.cohort - att.mean * att.mean;
                    att.std_error = std::sqrt(std::max(var, 0.0) / tot.cohort);
                }
                res.rows.push_back(row(series, x, "mean_attempts", att));
            }
            ++si;
        }
    }
    return res;
}

} // namespace

// ---------------------------------------------------------------- public API

ExperimentId parse_experiment_id(const std::string &name)
{
    if (name == "estimator-compare")
        return ExperimentId::EstimatorCompare;
    if (name == "two-ue")
        return ExperimentId::TwoUe;
    if (name == "resolve-vs-m" || name == "resolve-vs-M")
        return ExperimentId::ResolveVsM;
    if (name == "bias-sweep")
        return ExperimentId::BiasSweep;
    if (name == "crowded")
        return ExperimentId::Crowded;
    throw std::invalid_argument("unknown experiment id '" + name + "'");
}

std::string to_string(ExperimentId id)
{
    switch (id)
    {
    case ExperimentId::EstimatorCompare:
        return "estimator-compare";
    case ExperimentId::TwoUe:
        return "two-ue";
    case ExperimentId::ResolveVsM:
        return "resolve-vs-m";
    case ExperimentId::BiasSweep:
        return "bias-sweep";
    case ExperimentId::Crowded:
        return "crowded";
    }
    return "unknown";
}

ConfigMap parse_config(const std::string &text)
{
    ConfigMap out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

ConfigMap load_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void ExperimentSpec::validate() const
{
    if (trials < 1)
        throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
    if (grid.empty())
        throw std::invalid_argument("ExperimentSpec: sweep grid is empty");
    if (threads < 1)
        throw std::invalid_argument("ExperimentSpec: threads must be >= 1");
}

ExperimentSpec make_spec(ExperimentId id, const ConfigMap &cfg)
{
    ExperimentSpec s;
    s.id = id;
    switch (id)
    {
    case ExperimentId::EstimatorCompare:
        s.grid = {1, 2, 5, 10, 25, 50, 100, 200, 300, 400, 500};
        s.trials = 100000;
        break;
    case ExperimentId::TwoUe:
        s.grid = {-6, -5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5, 6};
        s.trials = 100000;
        break;
    case ExperimentId::ResolveVsM:
        s.grid = {1, 5, 10, 25, 50, 100, 200, 300, 400, 500};
        s.trials = 10000; // blocks; each contributes about 9 used pilots
        break;
    case ExperimentId::BiasSweep:
        s.grid = {-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2};
        s.trials = 100000;
        s.options["interference"] = "on,off";
        break;
    case ExperimentId::Crowded:
        s.grid = {100, 1000, 2000, 3000, 4000, 5000, 6000, 7000, 8000, 9000, 10000, 11000, 12000};
        s.trials = 10; // replications
        s.options["interference"] = "on,off";
        break;
    }
    if (id == ExperimentId::ResolveVsM)
        s.options["interference"] = "off,on";

    for (const auto &[k, v] : cfg)
    {
        if (k == "grid")
            s.grid = to_double_list(v, k);
        else if (k == "trials")
            s.trials = long(to_double(v, k));
        else if (k == "seed")
            s.seed = std::stoull(v);
        else if (k == "threads")
            s.threads = int(to_double(v, k));
        else if (k == "out")
            s.out_path = v;
        else
            s.options[k] = v;
    }
    return s;
}

const CsvRow *ExperimentResult::find(const std::string &series, double sweep_value, const std::string &metric) const
{
    for (const auto &r : rows)
        if (r.series == series && r.sweep_value == sweep_value && r.metric == metric)
            return &r;
    return nullptr;
}

ExperimentResult run_experiment(const ExperimentSpec &spec)
{
    spec.validate();
    switch (spec.id)
    {
    case ExperimentId::EstimatorCompare:
        return run_estimator_compare(spec);
    case ExperimentId::TwoUe:
        return run_two_ue(spec);
    case ExperimentId::ResolveVsM:
        return run_resolve_vs_m(spec);
    case ExperimentId::BiasSweep:
        return run_bias_sweep(spec);
    case ExperimentId::Crowded:
        return run_crowded(spec);
    }
    throw std::invalid_argument("run_experiment: unknown experiment");
}

std::string to_csv(const ExperimentResult &result)
{
    std::string out = "series,sweep_value,metric,estimate,std_error,trials,closed_form\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto &r : result.rows)
    {
        out += r.series + ',' + num(r.sweep_value) + ',' + r.metric + ',' + num(r.estimate) + ',' +
               num(r.std_error) + ',' + std::to_string(r.trials) + ',' +
               (r.closed_form ? num(*r.closed_form) : std::string()) + '\n';
    }
    return out;
}

void emit_csv(const ExperimentResult &result, const std::string &path)
{
    if (result.rows.empty())
        throw std::invalid_argument("emit_csv: empty result");
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("emit_csv: cannot open " + path);
    f << to_csv(result);
    f.flush();
    if (!f)
        throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<CsvRow> parse_csv(const std::string &text)
{
    std::vector<CsvRow> out;
    std::stringstream ss(text);
    std::string line;
    bool header = true;
    while (std::getline(ss, line))
    {
        if (header)
        {
            header = false;
            continue;
        }
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        if (f.size() == 6)
            f.emplace_back();
        if (f.size() != 7)
            throw std::invalid_argument("parse_csv: expected 7 fields");
        CsvRow r;
        r.series = f[0];
        r.sweep_value = std::strtod(f[1].c_str(), nullptr);
        r.metric = f[2];
        r.estimate = std::strtod(f[3].c_str(), nullptr);
        r.std_error = std::strtod(f[4].c_str(), nullptr);
        r.trials = std::stol(f[5]);
        if (!f[6].empty())
            r.closed_form = std::strtod(f[6].c_str(), nullptr);
        out.push_back(r);
    }
    return out;
}

void parallel_for(long n, int threads, const std::function<void(long)> &body)
{
    if (threads <= 1 || n <= 1)
    {
        for (long i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;)
        {
            const long i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard lk(err_mu);
                if (!err)
                    err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int t = int(std::min<long>(threads, n));
    for (int k = 0; k < t; ++k)
        pool.emplace_back(worker);
    for (auto &th : pool)
        th.join();
    if (err)
        std::rethrow_exception(err);
}

Estimate summarize(const std::vector<double> &values)
{
    Estimate e;
    e.n = long(values.size());
    if (values.empty())
        return e;
    double s = 0.0;
    for (double v : values)
        s += v;
    e.mean = s / e.n;
    if (e.n > 1)
    {
        double ss = 0.0;
        for (double v : values)
            ss += (v - e.mean) * (v - e.mean);
        e.std_error = std::sqrt(ss / (e.n - 1) / e.n);
    }
    return e;
}

Estimate bernoulli(long successes, long n)
{
    Estimate e;
    e.n = n;
    if (n <= 0)
        return e;
    e.mean = double(successes) / n;
    if (n > 1)
        e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / (n - 1)); // sample std of the 0/1 values over sqrt(n)
    return e;
}

std::vector<ValidationCheck> run_validation(std::uint64_t seed, long trials, int threads)
{
    std::vector<ValidationCheck> out;
    auto add = [&](std::string name, double closed, double emp, double tol) {
        out.push_back({std::move(name), closed, emp, tol, std::fabs(closed - emp) <= tol});
    };

    // Repeat probability: closed form against full channel simulation.
    int tag = 0;
    for (const auto &[M, dsnr] : {std::pair{100, 0.0}, std::pair{100, 3.0}, std::pair{500, -3.0}})
    {
        RaBlockConfig cfg;
        cfg.M = M;
        const std::vector<ContenderState> cs{{1.0, 1.0, 0.0, 0.0}, {std::pow(10.0, dsnr / 10.0), 1.0, 0.0, 0.0}};
        std::vector<unsigned char> rep(trials);
        parallel_for(trials, threads, [&](long i) {
            Rng rng = make_substream(seed, 0xA11Dull + tag, i);
            rep[i] = contend_on_pilot(cfg, cs, nullptr, rng)[0] == Decision::Repeat;
        });
        long n = 0;
        for (auto r : rep)
            n += r;
        ContentionScenario sc;
        sc.contenders = {link_params(cfg, cs[0]), link_params(cfg, cs[1])};
        const double cf = repetition_probability(sc, 0);
        const Estimate e = bernoulli(n, trials);
        char name[96];
        std::snprintf(name, sizeof name, "repeat probability M=%d dSNR=%+.0f dB", M, dsnr);
        add(name, cf, e.mean, 3.0 * std::sqrt(cf * (1.0 - cf) / trials) + 1e-12);
        ++tag;
    }

    // Moments of z / sqrt(M) from the chi / Gaussian sampler.
    {
        UeLinkParams p;
        p.M = 10;
        ContentionScenario sc;
        sc.contenders = {p};
        sc.omega = 10.0;
        const MeanVar mv = zk_mean_var(p, sc.alpha_t());
        std::vector<double> re(trials), sq(trials);
        parallel_for(trials, threads, [&](long i) {
            Rng rng = make_substream(seed, 0xB0B, i);
            const cdouble z = sample_zk(sc, 0, rng) / std::sqrt(double(p.M));
            re[i] = z.real();
            sq[i] = std::norm(z - mv.mean);
        });
        const Estimate m = summarize(re), v = summarize(sq);
        add("mean of z/sqrt(M), M=10", mv.mean, m.mean, 3.0 * m.std_error);
        add("variance of z/sqrt(M), M=10", mv.variance, v.mean, 3.0 * v.std_error);
    }

    // Collision probability against simulated pilot counts.
    {
        const PilotLoadModel load{5000, 0.005, 10};
        std::vector<unsigned char> col(trials);
        parallel_for(trials, threads, [&](long i) {
            Rng rng = make_substream(seed, 0xC011, i);
            std::binomial_distribution<int> b(load.K0, load.select_probability());
            col[i] = b(rng) >= 2;
        });
        long n = 0;
        for (auto c : col)
            n += c;
        const double cf = collision_probability(load);
        add("collision probability K0=5000", cf, bernoulli(n, trials).mean,
            3.0 * std::sqrt(cf * (1.0 - cf) / trials));
    }
    return out;
}

} // namespace sucre
