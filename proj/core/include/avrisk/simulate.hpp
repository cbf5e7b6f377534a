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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "avrisk/risk.hpp"
#include "avrisk/scenario.hpp"

namespace avrisk::sim
{

/// Counter-based generator: each (seed, stream) pair names an independent, individually
/// reproducible SplitMix64 sequence.
class EpisodeRng
{
public:
    EpisodeRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next();
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();

private:
    std::uint64_t state_;
};

struct Episode
{
    std::vector<std::size_t> realized; // outcome indices, ascending
    double total_cost = 0.0;
};

/// Independent outcomes are Bernoulli draws; each exclusive group realizes at most one
/// member from a single categorical draw.
Episode sample_episode(const ActionAlternative& action, EpisodeRng& rng);

struct SimulationEstimate
{
    std::uint64_t n = 0;
    double mean = 0.0;
    double std_error = 0.0;
    Interval ci95;
    std::uint64_t seed = 0;
};

struct SimulationOptions
{
    unsigned workers = 1;
    // Episodes per aggregation chunk. Part of the numeric contract: changing it changes
    // the floating-point summation order.
    std::uint64_t chunk_size = 4096;
};

/// Mean realized cost over n episodes. Episode i draws from stream i of the seed and
/// chunk partial sums are merged in chunk order, so results are bit-identical for any
/// worker count. Throws std::invalid_argument when n == 0.
SimulationEstimate simulate(const ActionAlternative& action, std::uint64_t n, std::uint64_t seed,
                            const SimulationOptions& options = {});

struct ConsistencyRow
{
    std::string action_id;
    double analytic = 0.0;
    SimulationEstimate empirical;
    double z_score = 0.0;
    bool pass = false;
};

struct ConsistencyReport
{
    std::vector<ConsistencyRow> rows;
    bool pass = true;
};

/// z = (empirical - analytic) / stderr; passes when |z| <= 4. A zero stderr passes only
/// on exact agreement.
ConsistencyRow compare_estimate(std::string action_id, double analytic, const SimulationEstimate& empirical);

/// Simulates every action of prepare(scenario) and compares with cumulative_risk.
ConsistencyReport consistency_check(const Scenario& scenario, std::uint64_t n, std::uint64_t seed,
                                    const SimulationOptions& options = {});

inline constexpr const char* environment_party = "environment";

struct ExposureReport
{
    std::map<std::string, double> exposure; // party id -> mean realized magnitude
    double total_mean = 0.0;
    std::vector<std::string> unassigned_outcomes; // pooled under environment_party
    std::vector<std::string> warnings;
};

/// Per-party mean realized harm for one action of prepare(scenario). Every scenario party
/// appears in the map, with 0 when the action never harms it.
ExposureReport party_exposure(const Scenario& scenario, const std::string& action_id, std::uint64_t n,
                              std::uint64_t seed, const SimulationOptions& options = {});

} // namespace avrisk::sim
