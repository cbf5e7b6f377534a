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

// Acceptance suite: one line per criterion, non-zero exit if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "avrisk/baselines.hpp"
#include "avrisk/catalog.hpp"
#include "avrisk/dsl.hpp"
#include "avrisk/fairness.hpp"
#include "avrisk/risk.hpp"
#include "avrisk/simulate.hpp"
#include "avrisk/valuation.hpp"
#include "cli.hpp"
#include "support/generators.hpp"

namespace
{

using namespace avrisk;
using Clock = std::chrono::steady_clock;

struct Verdict
{
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

bool rel_equal(double actual, double expected, double tol)
{
    return std::fabs(actual - expected) <= tol * std::max(std::fabs(expected), 1e-300);
}

std::string cli(std::vector<std::string> args, int* code = nullptr)
{
    args.insert(args.begin(), "avrisk");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code)
        *code = rc;
    return out.str();
}

// Penalty column (index 6) of the outcome rows and the total row of an evaluate CSV.
std::pair<std::vector<double>, double> csv_penalties(const std::string& csv)
{
    std::vector<double> rows;
    double total = std::nan("");
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
    {
        std::vector<std::string> f;
        std::string cur;
        bool quoted = false;
        for (char c : line)
        {
            if (c == '"')
                quoted = !quoted;
            else if (c == ',' && !quoted)
            {
                f.push_back(cur);
                cur.clear();
            }
            else
                cur += c;
        }
        f.push_back(cur);
        if (f.size() < 7)
            continue;
        if (f[0] == "outcome")
            rows.push_back(std::stod(f[6]));
        else if (f[0] == "total")
            total = std::stod(f[6]);
    }
    return {rows, total};
}

Verdict lane_change_table()
{
    Verdict v;
    const auto start = Clock::now();
    const std::vector<double> with_turn = {0.5, 2, 3, 1, 1, 0.5, 50};
    const std::vector<double> without_turn = {0.5, 2, 3, 1, 1, 0.5, 0};
    for (const auto& [name, expected, total] :
         {std::tuple{"lane_change_truck", with_turn, 58.0}, std::tuple{"lane_change_truck_no_turn", without_turn, 8.0}})
    {
        const auto& action = find_catalog_entry(name)->scenario.actions.at(0);
        v.require(action.outcomes.size() == 7, std::string(name) + " does not have 7 rows");
        for (std::size_t i = 0; i < action.outcomes.size() && i < 7; ++i)
        {
            const double p = risk_penalty(action.outcomes[i]);
            v.require(expected[i] == 0 ? p == 0 : rel_equal(p, expected[i], 1e-9),
                      std::string(name) + " row " + std::to_string(i + 1) + " = " + fmt(p));
        }
        const double sum = cumulative_risk(action).penalty;
        v.require(rel_equal(sum, total, 1e-9), std::string(name) + " total " + fmt(sum));

        int code = -1;
        const auto [rows, csv_total] = csv_penalties(cli({"evaluate", name, "--format", "csv"}, &code));
        v.require(code == 0, "evaluate exit code " + std::to_string(code));
        v.require(rows.size() == 7, "evaluate csv row count");
        for (std::size_t i = 0; i < rows.size() && i < 7; ++i)
            v.require(expected[i] == 0 ? rows[i] == 0 : rel_equal(rows[i], expected[i], 1e-9),
                      std::string(name) + " csv row " + std::to_string(i + 1));
        v.require(rel_equal(csv_total, total, 1e-9), std::string(name) + " csv total");
    }
    const double elapsed = seconds_since(start);
    v.require(elapsed < 1.0, "took " + fmt(elapsed) + " s");
    if (v.pass)
        v.detail = "penalties 0.5 2 3 1 1 0.5 50|0, totals 58 / 8, " + fmt(elapsed) + " s";
    return v;
}

Outcome make_outcome(double magnitude, double p)
{
    Outcome o;
    o.id = "o";
    o.magnitude = magnitude;
    o.probability = Probability(p);
    return o;
}

Verdict expectation_arithmetic()
{
    Verdict v;
    const double reactor = risk_penalty(make_outcome(10'000, 0.0001));
    const double crash = risk_penalty(make_outcome(200, 0.01));
    v.require(reactor == 1.0, "10000 x 0.0001 = " + fmt(reactor));
    v.require(crash == 2.0, "200 x 0.01 = " + fmt(crash));
    if (v.pass)
        v.detail = "10000 x 0.01% = 1, 200 x 0.01 = 2";
    return v;
}

Verdict monetization()
{
    Verdict v;
    Consequence death;
    death.fatalities = 1;
    Consequence hour;
    hour.person_hours = 1;
    const double a = monetize(death, {}).value;
    const double b = monetize(hour, {}).value;
    v.require(a == 9'400'000.0, "fatality = " + fmt(a));
    v.require(b == 13.30, "person-hour = " + fmt(b));
    if (v.pass)
        v.detail = "1 fatality = 9400000, 1 person-hour = 13.3";
    return v;
}

Verdict modifiers()
{
    Verdict v;
    const auto table = default_modifier_table();
    Party drunk;
    drunk.attributes["intoxicated"] = "true";
    Party female;
    female.attributes["sex"] = "female";
    const double d = apply_fatality_modifiers(Probability(0.1), drunk, table).value();
    const double f = apply_fatality_modifiers(Probability(0.1), female, table).value();
    const double ratio = table.factor("age", "70") / table.factor("age", "20");
    const double clamped = apply_fatality_modifiers(Probability(0.6), drunk, table).value();
    v.require(d == 2 * 0.1, "intoxicated gives " + fmt(d));
    v.require(f == 0.1 * 1.28, "female gives " + fmt(f));
    v.require(ratio == 3.0, "age 70 / age 20 = " + fmt(ratio));
    v.require(clamped == 1.0, "0.6 intoxicated gives " + fmt(clamped));
    if (v.pass)
        v.detail = "x2 intoxicated, x1.28 female, age70/age20 = 3, 0.6 x 2 clamps to 1";
    return v;
}

Verdict monte_carlo()
{
    Verdict v;
    const auto start = Clock::now();
    std::size_t actions = 0;
    double worst = 0.0;
    for (const auto& entry : catalog())
    {
        const auto report = sim::consistency_check(entry.scenario, 200'000, 20260101);
        for (const auto& row : report.rows)
        {
            ++actions;
            worst = std::max(worst, std::fabs(row.z_score));
            v.require(row.pass, entry.name + "/" + row.action_id + " z = " + fmt(row.z_score));
        }
    }
    const double elapsed = seconds_since(start);
    v.require(elapsed < 60.0, "took " + fmt(elapsed) + " s");
    if (v.pass)
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%zu actions at n = 200000, max |z| = %.2f, %.1f s", actions, worst, elapsed);
        v.detail = buf;
    }
    return v;
}

Verdict deontological_pathology()
{
    Verdict v;
    const auto& s = find_catalog_entry("deontological_gamble")->scenario;
    const auto d = baselines::decide_deontological(s);
    const auto r = decide(s);
    const auto c = baselines::compare(s);
    v.require(d.action_id == "accelerate", "deontological chose " + d.action_id);
    v.require(r.chosen_action == "brake", "risk decider chose " + r.chosen_action);
    v.require(c.divergent, "compare did not flag divergence");
    v.require(c.max_gap == 19'300.0, "gap " + fmt(c.max_gap));
    if (v.pass)
        v.detail = "deontological: accelerate, risk: brake, gap 19300";
    return v;
}

std::vector<std::string> values_for(const std::string& attribute)
{
    if (attribute == "age")
        return {"20", "45", "70"};
    if (attribute == "sex")
        return {"male", "female"};
    if (attribute == "vehicle_mass_class")
        return {"light", "heavy"};
    if (attribute == "vehicle_cost_class")
        return {"low", "high"};
    if (attribute == "lane_side")
        return {"left", "right"};
    return {"true", "false"};
}

Verdict exclusion_invariance()
{
    Verdict v;
    std::mt19937_64 rng(20260707);
    std::size_t scenarios = 0, checks = 0;
    for (int i = 0; i < 1000; ++i)
    {
        auto s = gen::random_scenario(rng, {.max_parties = 3});
        // every generated scenario excludes at least one attribute
        if (s.fairness.excluded_attributes.empty())
            s.fairness.excluded_attributes.insert("helmet");
        ++scenarios;
        for (const auto& attribute : s.fairness.excluded_attributes)
        {
            ++checks;
            if (!exclusion_invariance_check(s, attribute, values_for(attribute)).invariant)
                v.require(false, "scenario " + std::to_string(i) + " varies with " + attribute);
        }
    }

    auto helmet = find_catalog_entry("motorcyclists_helmet")->scenario;
    const auto excluded = exclusion_invariance_check(helmet, "helmet", {"true", "false"});
    v.require(excluded.invariant, "helmet scenario varies under the default policy");
    helmet.fairness = {};
    const auto open = exclusion_invariance_check(helmet, "helmet", {"true", "false"});
    v.require(!open.invariant, "helmet scenario is invariant with an empty policy");
    for (const auto& w : open.witnesses)
        for (const auto* pair : {&w.assignment_a, &w.assignment_b})
        {
            const auto& chosen = pair == &w.assignment_a ? w.chosen_a : w.chosen_b;
            const auto& a = *pair;
            if (a.at("rider_left") != a.at("rider_right"))
            {
                const auto struck = chosen == "strike_left" ? "rider_left" : "rider_right";
                v.require(a.at(struck) == "true", "empty policy struck the unhelmeted rider");
            }
        }
    if (v.pass)
        v.detail = std::to_string(scenarios) + " scenarios, " + std::to_string(checks) +
                   " attribute checks; helmet flips from 'strike the helmeted' to invariant";
    return v;
}

Verdict certainty_weighting()
{
    Verdict v;
    const CertaintyWeighting linear{};
    const CertaintyWeighting flat{WeightingMode::exponential, 0.0};
    const CertaintyWeighting expo{WeightingMode::exponential};
    double prev_ratio = 0.0;
    for (int i = 1; i <= 1000; ++i)
    {
        const Probability p(i / 1000.0);
        const double a = certainty_weighted_penalty(p, 9.4e6, flat);
        const double b = certainty_weighted_penalty(p, 9.4e6, linear);
        v.require(std::fabs(a - b) <= 1e-12 * std::fabs(b), "gamma 0 differs at p = " + fmt(p.value()));
        const double ratio = certainty_weighted_penalty(p, 1.0, expo) / p.value();
        v.require(ratio > prev_ratio, "penalty/p not increasing at p = " + fmt(p.value()));
        prev_ratio = ratio;
    }

    auto tunnel = find_catalog_entry("tunnel_child")->scenario;
    tunnel.weighting = linear;
    const auto lin = decide(tunnel);
    tunnel.weighting = expo;
    const auto exp = decide(tunnel);
    v.require(lin.chosen_action != "swerve_partial", "linear already picks the balancing action");
    v.require(exp.chosen_action == "swerve_partial", "exponential picks " + exp.chosen_action);
    // frozen hand computation: 0.95 * e^(0.95 ln 10) and 2 * 0.5 * e^(0.5 ln 10)
    v.require(std::fabs(exp.score("stay").penalty - 8.466883912270584) <= 1e-12, "stay penalty");
    v.require(std::fabs(exp.score("swerve_partial").penalty - 3.1622776601683795) <= 1e-12, "partial penalty");
    v.require(lin.score("stay").penalty == 0.95 && lin.score("swerve_partial").penalty == 1.0, "linear penalties");
    if (v.pass)
        v.detail = "grid of 1000 ok; tunnel linear: " + lin.chosen_action + " (0.95 vs 1), exponential: " +
                   exp.chosen_action + " (8.467 vs 3.162)";
    return v;
}

Verdict trolley_degeneracy()
{
    Verdict v;
    std::mt19937_64 rng(20260808);
    int agreed = 0;
    for (int i = 0; i < 500; ++i)
    {
        const auto s = gen::random_trolley(rng);
        const auto t = baselines::decide_trolley(s);
        const auto r = select_action(s).chosen_action;
        if (t == r)
            ++agreed;
        else
            v.require(false, "instance " + std::to_string(i) + ": trolley " + t + " vs risk " + r);
    }
    if (v.pass)
        v.detail = std::to_string(agreed) + " / 500 instances agree";
    return v;
}

Verdict round_trip()
{
    Verdict v;
    std::size_t catalog_count = 0;
    for (const auto* list : {&catalog(), &catalog_extras()})
        for (const auto& entry : *list)
        {
            ++catalog_count;
            const auto parsed = dsl::parse(dsl::serialize(entry.scenario));
            v.require(parsed.ok() && *parsed.scenario == entry.scenario, entry.name + " does not round-trip");
        }
    std::mt19937_64 rng(20260909);
    for (int i = 0; i < 1000; ++i)
    {
        const auto s = gen::random_scenario(rng);
        const auto parsed = dsl::parse(dsl::serialize(s));
        v.require(parsed.ok() && *parsed.scenario == s, "generated scenario " + std::to_string(i));
    }

    // Damaged files: every diagnostic has a line and column inside the file.
    const std::string base = find_catalog_entry("pedestrian_blind_spot")->source;
    const std::vector<std::string> junk = {"= =",         "[",        "probability = 7", "party = nobody",
                                           "magnitude = x", "[outcome]", "id = ?",          "hold_course = maybe"};
    std::size_t diagnostics = 0;
    for (std::size_t k = 0; k < junk.size(); ++k)
        for (std::size_t at = 0; at < base.size(); at = base.find('\n', at + 1))
        {
            std::string text = base;
            text.insert(at == 0 ? 0 : at + 1, junk[k] + "\n");
            const int lines = static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1;
            for (const auto& d : dsl::parse(text).diagnostics)
            {
                ++diagnostics;
                v.require(d.span.line >= 1 && d.span.line <= lines && d.span.column >= 1,
                          "diagnostic without a valid span: " + dsl::format(d));
            }
            if (base.find('\n', at + 1) == std::string::npos)
                break;
        }
    if (v.pass)
        v.detail = std::to_string(catalog_count) + " shipped + 1000 generated scenarios; " +
                   std::to_string(diagnostics) + " diagnostics all carry line:column";
    return v;
}

Verdict determinism()
{
    Verdict v;
    const std::vector<std::string> base = {"simulate", "pedestrian_blind_spot", "--trials", "200000", "--seed", "7"};
    for (const char* format : {"json", "csv"})
    {
        std::vector<std::string> outputs;
        for (const char* workers : {"1", "2", "8"})
            for (int repeat = 0; repeat < 2; ++repeat)
            {
                auto args = base;
                args.insert(args.end(), {"--format", format, "--workers", workers});
                outputs.push_back(cli(args));
            }
        for (const auto& o : outputs)
            v.require(o == outputs.front() && !o.empty(), std::string(format) + " output differs");
    }
    for (const auto& entry : catalog())
        for (const auto& action : prepare(entry.scenario).actions)
        {
            const auto one = sim::simulate(action, 100'000, 99, {.workers = 1});
            for (unsigned w : {2u, 8u})
            {
                const auto other = sim::simulate(action, 100'000, 99, {.workers = w});
                v.require(std::memcmp(&one.mean, &other.mean, sizeof(double)) == 0 &&
                              std::memcmp(&one.std_error, &other.std_error, sizeof(double)) == 0,
                          entry.name + "/" + action.id + " differs at " + std::to_string(w) + " workers");
            }
        }
    if (v.pass)
        v.detail = "json and csv byte-identical at 1, 2, 8 workers; library estimates bit-identical";
    return v;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"lane change table reproduction", lane_change_table},
        {"expectation arithmetic", expectation_arithmetic},
        {"monetization constants", monetization},
        {"fatality modifiers", modifiers},
        {"Monte Carlo consistency", monte_carlo},
        {"deontological pathology", deontological_pathology},
        {"exclusion invariance", exclusion_invariance},
        {"certainty weighting", certainty_weighting},
        {"trolley degeneracy", trolley_degeneracy},
        {"DSL round-trip", round_trip},
        {"determinism", determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        Verdict verdict;
        try
        {
            verdict = criteria[i].second();
        }
        catch (const std::exception& e)
        {
            verdict = {false, std::string("exception: ") + e.what()};
        }
        failed += !verdict.pass;
        std::printf("[%s] %2zu %s: %s\n", verdict.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    verdict.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
