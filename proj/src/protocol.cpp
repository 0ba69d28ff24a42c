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

#include "sucre/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sucre
{

double BiasPolicy::value(const UeLinkParams &p) const
{
    const double unit = scale == BiasScale::PilotGain ? p.gain() : p.beta;
    return delta * unit / std::sqrt(double(p.M)) - 0.5 * omega_bar;
}

InterferenceConfig RaBlockConfig::interference_config() const
{
    InterferenceConfig ic;
    ic.enabled = interference;
    ic.geometry = geometry;
    ic.model = LargeScaleModel::non_los(); // neighbor data UEs are non-LoS Rayleigh
    ic.ues_per_neighbor = ues_per_neighbor;
    ic.M = M;
    ic.tau_p = tau_p;
    return ic;
}

void RaBlockConfig::validate() const
{
    if (M < 1 || tau_p < 1 || load.tau_p != tau_p || !(q > 0.0) || !(sigma2 > 0.0) || ues_per_neighbor < 0 ||
        !(power_range_db >= 0.0))
        throw std::invalid_argument("RaBlockConfig: invalid configuration");
}

double calibrate_omega_bar(const RaBlockConfig &cfg, int trials, Rng &rng)
{
    return mean_ul_interference(cfg.interference_config(), trials, rng);
}

ContenderState make_contender(const RaBlockConfig &cfg, const UeLink &ue, Rng &rng)
{
    ContenderState c;
    c.beta = ue.beta[0];
    c.angle = ue.angle_to_center();
    c.rho = cfg.q;
    if (cfg.power == PowerPolicy::Randomized)
        c.rho = cfg.q * std::pow(10.0, -cfg.power_range_db * uniform01(rng) / 10.0);
    c.upsilon = cfg.interference ? dl_interference_variance(ue, cfg.q, cfg.ues_per_neighbor) : 0.0;
    return c;
}

UeLinkParams link_params(const RaBlockConfig &cfg, const ContenderState &c)
{
    UeLinkParams p;
    p.rho = c.rho;
    p.beta = c.beta;
    p.tau_p = cfg.tau_p;
    p.q = cfg.q;
    p.sigma2 = cfg.sigma2;
    p.upsilon = c.upsilon;
    p.M = cfg.M;
    return p;
}

const char *to_string(OutcomeClass c)
{
    switch (c)
    {
    case OutcomeClass::Unused:
        return "unused";
    case OutcomeClass::SingletonAdmitted:
        return "singleton_admitted";
    case OutcomeClass::Resolved:
        return "resolved";
    case OutcomeClass::FalseNegative:
        return "false_negative";
    case OutcomeClass::FalsePositive:
        return "false_positive";
    }
    return "unknown";
}

Decision ue_decision(const AlphaEstimate &estimate, const UeLinkParams &p, double eps)
{
    return p.gain() > 0.5 * estimate.value + eps ? Decision::Repeat : Decision::Inactive;
}

OutcomeClass classify_outcome(int contenders, int repeaters)
{
    if (contenders < 0 || repeaters < 0 || repeaters > contenders)
        throw std::logic_error("classify_outcome: repeaters must lie in [0, contenders]");
    if (contenders == 0)
        return OutcomeClass::Unused;
    if (repeaters == 0)
        return OutcomeClass::FalseNegative;
    if (repeaters >= 2)
        return OutcomeClass::FalsePositive;
    return contenders == 1 ? OutcomeClass::SingletonAdmitted : OutcomeClass::Resolved;
}

PilotSignals receive_pilot(const RaBlockConfig &cfg, std::span<const ContenderState> cs, const Eigen::VectorXcd *ul,
                           Rng &rng)
{
    PilotSignals s;
    s.channels.reserve(cs.size());
    s.y = Eigen::VectorXcd::Zero(cfg.M);
    for (const auto &c : cs)
    {
        s.channels.push_back(sample_channel(cfg.channel, c.beta, c.angle, cfg.M, rng));
        s.y += std::sqrt(c.rho * cfg.tau_p) * s.channels.back();
    }
    if (ul)
        s.y += *ul;
    for (int i = 0; i < cfg.M; ++i)
        s.y[i] += complex_normal(rng, cfg.sigma2);
    return s;
}

std::vector<cdouble> precoded_response(const RaBlockConfig &cfg, std::span<const ContenderState> cs,
                                       const PilotSignals &sig, Rng &rng)
{
    const double scale = std::sqrt(cfg.q * cfg.tau_p) / sig.y.norm();
    std::vector<cdouble> z(cs.size());
    for (std::size_t k = 0; k < cs.size(); ++k)
    {
        // h^T y^* = sum_i h_i conj(y_i)
        const cdouble hy = sig.y.dot(sig.channels[k]);
        z[k] = scale * hy + complex_normal(rng, cs[k].upsilon) + complex_normal(rng, cfg.sigma2);
    }
    return z;
}

std::vector<Decision> contend_on_pilot(const RaBlockConfig &cfg, std::span<const ContenderState> cs,
                                       const Eigen::VectorXcd *ul, Rng &rng)
{
    const PilotSignals sig = receive_pilot(cfg, cs, ul, rng);
    const std::vector<cdouble> z = precoded_response(cfg, cs, sig, rng);
    std::vector<Decision> out(cs.size());
    for (std::size_t k = 0; k < cs.size(); ++k)
    {
        const UeLinkParams p = link_params(cfg, cs[k]);
        const AlphaEstimate est = estimate_alpha(cfg.estimator, z[k], p);
        out[k] = ue_decision(est, p, cfg.bias.value(p));
    }
    return out;
}

double activity_statistic(const Eigen::VectorXcd &y)
{
    return y.squaredNorm() / double(y.size());
}

bool detect_activity(const Eigen::VectorXcd &y, double noise_floor, double margin)
{
    return activity_statistic(y) > noise_floor * (1.0 + margin / std::sqrt(double(y.size())));
}

BlockResult resolve_block(const RaBlockConfig &cfg, std::span<const BlockContender> contenders, ProtocolKind kind,
                          Rng &rng)
{
    BlockResult r;
    r.admitted.assign(contenders.size(), false);
    std::vector<std::vector<std::size_t>> members(cfg.tau_p);
    for (std::size_t i = 0; i < contenders.size(); ++i)
    {
        const int t = contenders[i].pilot;
        if (t < 0 || t >= cfg.tau_p)
            throw std::invalid_argument("resolve_block: pilot index out of range");
        members[t].push_back(i);
    }

    std::vector<UlInterference> ul;
    if (kind == ProtocolKind::Sucre && cfg.interference)
    {
        const InterferenceScene scene = draw_neighbor_scene(cfg.interference_config(), rng);
        ul = ul_interference_block(scene, cfg.M, cfg.tau_p, rng);
    }

    r.pilots.resize(cfg.tau_p);
    std::vector<ContenderState> cs;
    for (int t = 0; t < cfg.tau_p; ++t)
    {
        PilotOutcome &o = r.pilots[t];
        o.pilot = t;
        o.contenders = int(members[t].size());
        if (o.contenders == 0)
        {
            o.cls = OutcomeClass::Unused;
            continue;
        }
        std::vector<Decision> dec;
        if (kind == ProtocolKind::Baseline)
        {
            dec.assign(members[t].size(), Decision::Repeat);
        }
        else
        {
            cs.clear();
            for (std::size_t i : members[t])
                cs.push_back(make_contender(cfg, contenders[i].link, rng));
            dec = contend_on_pilot(cfg, cs, ul.empty() ? nullptr : &ul[t].vec, rng);
        }
        for (Decision d : dec)
            o.repeaters += d == Decision::Repeat;
        o.cls = classify_outcome(o.contenders, o.repeaters);
        if (o.repeaters == 1)
            for (std::size_t j = 0; j < dec.size(); ++j)
                if (dec[j] == Decision::Repeat)
                    r.admitted[members[t][j]] = true;
    }
    return r;
}

namespace
{

std::vector<BlockContender> draw_block_contenders(const RaBlockConfig &cfg, bool need_links, Rng &rng)
{
    cfg.validate();
    std::binomial_distribution<int> active(cfg.load.K0, cfg.load.Pa);
    std::uniform_int_distribution<int> pick(0, cfg.tau_p - 1);
    const int n = active(rng);
    std::vector<BlockContender> out(n);
    for (auto &c : out)
    {
        c.pilot = pick(rng);
        if (need_links)
            c.link = drop_ue_link(cfg.geometry, cfg.large_scale, 0, rng);
    }
    return out;
}

} // namespace

std::vector<PilotOutcome> run_ra_block(const RaBlockConfig &cfg, Rng &rng)
{
    const auto cs = draw_block_contenders(cfg, true, rng);
    return resolve_block(cfg, cs, ProtocolKind::Sucre, rng).pilots;
}

std::vector<PilotOutcome> run_baseline_block(const RaBlockConfig &cfg, Rng &rng)
{
    const auto cs = draw_block_contenders(cfg, false, rng);
    return resolve_block(cfg, cs, ProtocolKind::Baseline, rng).pilots;
}

CrowdedStats run_crowded_scenario(const RaBlockConfig &cfg, const CrowdedConfig &crowd, ProtocolKind kind, Rng &rng)
{
    cfg.validate();
    if (crowd.max_attempts < 1 || crowd.warmup_blocks < 0 || crowd.cohort_blocks < 1)
        throw std::invalid_argument("run_crowded_scenario: invalid configuration");

    struct Ue
    {
        UeLink link;
        int attempts = 0;
        bool cohort = false;
    };

    std::vector<Ue> backlog;
    std::uniform_int_distribution<int> pick(0, cfg.tau_p - 1);
    std::bernoulli_distribution rejoin(crowd.rejoin);
    CrowdedStats st;
    long cohort_pending = 0;
    const int cohort_end = crowd.warmup_blocks + crowd.cohort_blocks;

    auto finish = [&](const Ue &u, bool success) {
        if (!u.cohort)
            return;
        --cohort_pending;
        ++st.cohort;
        st.attempts_total += u.attempts;
        st.attempts_sq_total += long(u.attempts) * u.attempts;
        (success ? st.successes : st.failures) += 1;
    };

    for (int b = 0; b < cohort_end || cohort_pending > 0; ++b)
    {
        ++st.blocks;
        const int idle = cfg.load.K0 - int(backlog.size());
        std::vector<Ue> joining;
        std::vector<Ue> waiting;
        for (auto &u : backlog)
            (rejoin(rng) ? joining : waiting).push_back(std::move(u));

        std::binomial_distribution<int> activate(std::max(idle, 0), crowd.activation);
        const int fresh = activate(rng);
        const bool in_cohort = b >= crowd.warmup_blocks && b < cohort_end;
        for (int i = 0; i < fresh; ++i)
        {
            Ue u;
            if (kind == ProtocolKind::Sucre)
                u.link = drop_ue_link(cfg.geometry, cfg.large_scale, 0, rng);
            u.cohort = in_cohort;
            cohort_pending += in_cohort;
            joining.push_back(u);
        }

        std::vector<BlockContender> bc(joining.size());
        for (std::size_t i = 0; i < joining.size(); ++i)
        {
            ++joining[i].attempts;
            if (kind == ProtocolKind::Sucre && crowd.redraw_link && joining[i].attempts > 1)
                joining[i].link = drop_ue_link(cfg.geometry, cfg.large_scale, 0, rng);
            bc[i].link = joining[i].link;
            bc[i].pilot = pick(rng);
        }
        const BlockResult res = resolve_block(cfg, bc, kind, rng);

        backlog = std::move(waiting);
        for (std::size_t i = 0; i < joining.size(); ++i)
        {
            if (res.admitted[i])
                finish(joining[i], true);
            else if (joining[i].attempts >= crowd.max_attempts)
                finish(joining[i], false);
            else
                backlog.push_back(std::move(joining[i]));
        }
    }
    return st;
}

} // namespace sucre
