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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "avrisk/catalog.hpp"
#include "avrisk/dsl.hpp"
#include "avrisk/fairness.hpp"
#include "avrisk/risk.hpp"
#include "avrisk/simulate.hpp"
#include "support/generators.hpp"

namespace
{

using namespace avrisk;

std::vector<Scenario> generated(std::size_t count, int max_actions)
{
    std::mt19937_64 rng(42);
    std::vector<Scenario> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(gen::random_scenario(rng, {.max_actions = max_actions}));
    return out;
}

void BM_SelectAction(benchmark::State& state)
{
    const auto scenarios = generated(256, static_cast<int>(state.range(0)));
    std::size_t i = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(select_action(scenarios[i++ % scenarios.size()]));
}
BENCHMARK(BM_SelectAction)->Arg(2)->Arg(4)->Arg(8);

void BM_Decide(benchmark::State& state)
{
    const auto& s = find_catalog_entry("motorcyclists_helmet")->scenario;
    for (auto _ : state)
        benchmark::DoNotOptimize(decide(s));
}
BENCHMARK(BM_Decide);

void BM_Parse(benchmark::State& state)
{
    const auto& text = find_catalog_entry("lane_change_truck")->source;
    for (auto _ : state)
        benchmark::DoNotOptimize(dsl::parse(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Parse);

void BM_Serialize(benchmark::State& state)
{
    const auto& s = find_catalog_entry("lane_change_truck")->scenario;
    for (auto _ : state)
        benchmark::DoNotOptimize(dsl::serialize(s));
}
BENCHMARK(BM_Serialize);

void BM_Simulate(benchmark::State& state)
{
    const auto prepared = prepare(find_catalog_entry("lane_change_truck")->scenario);
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const sim::SimulationOptions options{.workers = static_cast<unsigned>(state.range(1))};
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::simulate(prepared.actions.front(), n, 1, options));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_Simulate)->Args({100'000, 1})->Args({100'000, 4})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
