/*
 * Copyright (C) 2026 The avrisk Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License"); you may not
 * use this file except in compliance with the License. You may obtain a copy of
 * the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
 * WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
 * License for the specific language governing permissions and limitations under
 * the License.
 */

#include "avrisk/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "avrisk/fairness.hpp"

namespace avrisk::sim
{

namespace
{

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Outcomes grouped into draw steps: one Bernoulli draw per independent outcome, one
// categorical draw per exclusive group, in order of first appearance.
struct Step
{
    std::vector<std::size_t> members;
    std::vector<double> cumulative; // cumulative probability per member
};

struct Plan
{
    std::vector<Step> steps;
    std::vector<double> magnitudes;

    explicit Plan(const ActionAlternative& action)
    {
        std::map<std::string, std::size_t> group_step;
        for (std::size_t i = 0; i < action.outcomes.size(); ++i)
        {
            const auto& o = action.outcomes[i];
            magnitudes.push_back(o.magnitude);
            const double p = o.probability.value();
            if (!o.exclusive_group)
            {
                steps.push_back({{i}, {p}});
                continue;
            }
            auto [it, inserted] = group_step.try_emplace(*o.exclusive_group, steps.size());
            if (inserted)
                steps.push_back({});
            auto& step = steps[it->second];
            step.members.push_back(i);
            step.cumulative.push_back((step.cumulative.empty() ? 0.0 : step.cumulative.back()) + p);
        }
    }

    // Calls realize(index) for each realized outcome in draw order.
    template <typename F>
    void sample(EpisodeRng& rng, F&& realize) const
    {
        for (const auto& step : steps)
        {
            const double u = rng.uniform();
            for (std::size_t k = 0; k < step.members.size(); ++k)
                if (u < step.cumulative[k])
                {
                    realize(step.members[k]);
                    break;
                }
        }
    }
};

struct Moments
{
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& other)
    {
        if (other.n == 0)
            return;
        if (n == 0)
        {
            *this = other;
            return;
        }
        const double total = static_cast<double>(n + other.n);
        const double delta = other.mean - mean;
        mean += delta * static_cast<double>(other.n) / total;
        m2 += other.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(other.n) / total;
        n += other.n;
    }
};

// Runs body(chunk_index, first_episode, end_episode) for every chunk, spread over workers.
template <typename Body>
void for_each_chunk(std::uint64_t n, const SimulationOptions& options, Body&& body)
{
    const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk_size);
    const std::uint64_t chunks = (n + chunk - 1) / chunk;
    const unsigned workers =
        static_cast<unsigned>(std::clamp<std::uint64_t>(options.workers == 0 ? 1 : options.workers, 1, chunks));

    auto run = [&](unsigned worker) {
        for (std::uint64_t c = worker; c < chunks; c += workers)
            body(c, c * chunk, std::min(n, (c + 1) * chunk));
    };
    if (workers == 1)
    {
        run(0);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(run, w);
}

std::uint64_t chunk_count(std::uint64_t n, const SimulationOptions& options)
{
    const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk_size);
    return (n + chunk - 1) / chunk;
}

} // namespace

EpisodeRng::EpisodeRng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(seed ^ mix64(stream + golden_gamma)))
{
}

std::uint64_t EpisodeRng::next()
{
    state_ += golden_gamma;
    return mix64(state_);
}

double EpisodeRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

Episode sample_episode(const ActionAlternative& action, EpisodeRng& rng)
{
    Plan plan(action);
    Episode episode;
    plan.sample(rng, [&](std::size_t i) { episode.realized.push_back(i); });
    std::sort(episode.realized.begin(), episode.realized.end());
    for (auto i : episode.realized)
        episode.total_cost += plan.magnitudes[i];
    return episode;
}

SimulationEstimate simulate(const ActionAlternative& action, std::uint64_t n, std::uint64_t seed,
                            const SimulationOptions& options)
{
    if (n == 0)
        throw std::invalid_argument("simulate needs at least one episode");

    const Plan plan(action);
    std::vector<Moments> partial(chunk_count(n, options));
    for_each_chunk(n, options, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
        Moments m;
        std::vector<std::size_t> realized;
        for (std::uint64_t i = begin; i < end; ++i)
        {
            EpisodeRng rng(seed, i);
            realized.clear();
            plan.sample(rng, [&](std::size_t k) { realized.push_back(k); });
            std::sort(realized.begin(), realized.end());
            double cost = 0.0;
            for (auto k : realized)
                cost += plan.magnitudes[k];
            m.add(cost);
        }
        partial[c] = m;
    });

    Moments total;
    for (const auto& m : partial)
        total.merge(m);

    SimulationEstimate est;
    est.n = n;
    est.seed = seed;
    est.mean = total.mean;
    est.std_error = n > 1 ? std::sqrt(total.m2 / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
    est.ci95 = {est.mean - 1.96 * est.std_error, est.mean + 1.96 * est.std_error};
    return est;
}

ConsistencyRow compare_estimate(std::string action_id, double analytic, const SimulationEstimate& empirical)
{
    ConsistencyRow row;
    row.action_id = std::move(action_id);
    row.analytic = analytic;
    row.empirical = empirical;
    const double diff = empirical.mean - analytic;
    if (empirical.std_error > 0.0)
        row.z_score = diff / empirical.std_error;
    else if (nearly_equal(empirical.mean, analytic, 1e-12))
        row.z_score = 0.0;
    else
        row.z_score = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    row.pass = std::fabs(row.z_score) <= 4.0;
    return row;
}

ConsistencyReport consistency_check(const Scenario& scenario, std::uint64_t n, std::uint64_t seed,
                                    const SimulationOptions& options)
{
    const Scenario prepared = prepare(scenario);
    ConsistencyReport report;
    for (const auto& action : prepared.actions)
    {
        auto row = compare_estimate(action.id, cumulative_risk(action).penalty, simulate(action, n, seed, options));
        report.pass = report.pass && row.pass;
        report.rows.push_back(std::move(row));
    }
    return report;
}

ExposureReport party_exposure(const Scenario& scenario, const std::string& action_id, std::uint64_t n,
                              std::uint64_t seed, const SimulationOptions& options)
{
    if (n == 0)
        throw std::invalid_argument("party_exposure needs at least one episode");

    const Scenario prepared = prepare(scenario);
    const auto& action = prepared.action(action_id);

    ExposureReport report;
    std::vector<std::string> names;
    for (const auto& p : prepared.parties)
        names.push_back(p.id);
    std::vector<std::size_t> owner(action.outcomes.size());
    for (std::size_t i = 0; i < action.outcomes.size(); ++i)
    {
        const auto& o = action.outcomes[i];
        auto it = o.affected_party ? std::find(names.begin(), names.end(), *o.affected_party) : names.end();
        if (it == names.end())
        {
            report.unassigned_outcomes.push_back(o.id);
            if (std::find(names.begin(), names.end(), environment_party) == names.end())
                names.push_back(environment_party);
            it = std::find(names.begin(), names.end(), environment_party);
        }
        owner[i] = static_cast<std::size_t>(it - names.begin());
    }
    if (!report.unassigned_outcomes.empty())
    {
        std::string list;
        for (const auto& id : report.unassigned_outcomes)
            list += (list.empty() ? "" : ", ") + id;
        report.warnings.push_back("UnassignedOutcome: no affected party for " + list + "; pooled under '" +
                                  environment_party + "'");
    }

    const Plan plan(action);
    struct Sums
    {
        std::vector<double> party;
        double total = 0.0;
    };
    std::vector<Sums> partial(chunk_count(n, options));
    for_each_chunk(n, options, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
        Sums sums{std::vector<double>(names.size(), 0.0), 0.0};
        std::vector<std::size_t> realized;
        for (std::uint64_t i = begin; i < end; ++i)
        {
            EpisodeRng rng(seed, i);
            realized.clear();
            plan.sample(rng, [&](std::size_t k) { realized.push_back(k); });
            std::sort(realized.begin(), realized.end());
            for (auto k : realized)
            {
                sums.party[owner[k]] += plan.magnitudes[k];
                sums.total += plan.magnitudes[k];
            }
        }
        partial[c] = std::move(sums);
    });

    std::vector<double> party(names.size(), 0.0);
    double total = 0.0;
    for (const auto& s : partial)
    {
        for (std::size_t k = 0; k < names.size(); ++k)
            party[k] += s.party[k];
        total += s.total;
    }
    const double count = static_cast<double>(n);
    for (std::size_t k = 0; k < names.size(); ++k)
        report.exposure[names[k]] = party[k] / count;
    report.total_mean = total / count;
    return report;
}

} // namespace avrisk::sim
