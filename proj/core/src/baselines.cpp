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

#include "avrisk/baselines.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "avrisk/errors.hpp"
#include "avrisk/fairness.hpp"
#include "avrisk/risk.hpp"

namespace avrisk::baselines
{

namespace
{

constexpr Role all_roles[] = {Role::occupant, Role::pedestrian, Role::cyclist, Role::other_driver, Role::object};

std::string number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string class_name(const std::set<Role>& roles)
{
    std::string out = "{";
    for (auto r : roles)
        out += (out.size() > 1 ? ", " : "") + std::string(to_string(r));
    return out + "}";
}

} // namespace

Hierarchy Hierarchy::defaults()
{
    return {{{Role::pedestrian, Role::cyclist}, {Role::other_driver, Role::occupant}, {Role::object}}};
}

std::size_t Hierarchy::class_of(Role role) const
{
    for (std::size_t k = 0; k < classes.size(); ++k)
        if (classes[k].count(role))
            return k;
    throw std::invalid_argument("role " + std::string(to_string(role)) + " is not in the hierarchy");
}

std::string Hierarchy::check() const
{
    for (auto role : all_roles)
    {
        std::size_t hits = 0;
        for (const auto& c : classes)
            hits += c.count(role);
        if (hits == 0)
            return "role " + std::string(to_string(role)) + " belongs to no class";
        if (hits > 1)
            return "role " + std::string(to_string(role)) + " belongs to more than one class";
    }
    return {};
}

double zero_harm_probability(const Scenario& scenario, const ActionAlternative& action, const std::set<Role>& roles)
{
    double none = 1.0;
    std::map<std::string, double> group_harm;
    for (const auto& o : action.outcomes)
    {
        if (o.magnitude <= 0.0 || !o.affected_party)
            continue;
        const Party* party = scenario.find_party(*o.affected_party);
        if (!party || !roles.count(party->role))
            continue;
        if (o.exclusive_group)
            group_harm[*o.exclusive_group] += o.probability.value();
        else
            none *= 1.0 - o.probability.value();
    }
    for (const auto& [group, p] : group_harm)
        none *= std::max(0.0, 1.0 - p);
    return none;
}

DeontologicalDecision decide_deontological(const Scenario& scenario, const Hierarchy& hierarchy,
                                           const DeontologicalOptions& options)
{
    if (scenario.actions.empty())
        throw empty_action_set();
    if (auto problem = hierarchy.check(); !problem.empty())
        throw std::invalid_argument("invalid hierarchy: " + problem);

    DeontologicalDecision decision;
    for (const auto& action : scenario.actions)
    {
        std::vector<double> row;
        for (const auto& c : hierarchy.classes)
            row.push_back(zero_harm_probability(scenario, action, c));
        decision.zero_harm.push_back(std::move(row));
    }

    std::vector<std::size_t> candidates(scenario.actions.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        candidates[i] = i;

    std::string why;
    for (std::size_t k = 0; k < hierarchy.classes.size() && candidates.size() > 1; ++k)
    {
        double best = 0.0;
        for (auto i : candidates)
            best = std::max(best, decision.zero_harm[i][k]);
        std::vector<std::size_t> kept;
        for (auto i : candidates)
            if (nearly_equal(decision.zero_harm[i][k], best))
                kept.push_back(i);
        if (kept.size() < candidates.size())
            why += (why.empty() ? "" : "; ") + class_name(hierarchy.classes[k]) + " zero-harm probability " +
                   number(best) + " decides";
        candidates = std::move(kept);
    }

    if (candidates.size() > 1 && options.expected_cost_fallback)
    {
        double best = cumulative_risk(scenario.actions[candidates.front()]).penalty;
        for (auto i : candidates)
            best = std::min(best, cumulative_risk(scenario.actions[i]).penalty);
        std::vector<std::size_t> kept;
        for (auto i : candidates)
            if (nearly_equal(cumulative_risk(scenario.actions[i]).penalty, best))
                kept.push_back(i);
        if (kept.size() < candidates.size())
            why += (why.empty() ? "" : "; ") + std::string("expected-cost fallback decides");
        candidates = std::move(kept);
    }

    const std::size_t chosen = candidates.size() == 1 ? candidates.front() : break_tie(scenario, candidates);
    if (candidates.size() > 1)
        why += (why.empty() ? "" : "; ") + std::string("tie policy decides");
    decision.action_id = scenario.actions[chosen].id;
    decision.rationale = "chose '" + decision.action_id + "': " + (why.empty() ? "only action" : why);
    return decision;
}

double fatality_count(const Outcome& outcome)
{
    if (outcome.consequence)
        return outcome.consequence->fatalities;
    return outcome.fatal ? 1.0 : 0.0;
}

bool is_trolley_scenario(const Scenario& scenario)
{
    if (scenario.actions.size() != 2)
        return false;
    for (const auto& a : scenario.actions)
        for (const auto& o : a.outcomes)
            if (o.probability.value() != 0.0 && o.probability.value() != 1.0)
                return false;
    return true;
}

std::string decide_trolley(const Scenario& scenario)
{
    if (scenario.actions.size() != 2)
        throw not_a_trolley_scenario("a trolley scenario has exactly two actions, this one has " +
                                     std::to_string(scenario.actions.size()));
    if (!is_trolley_scenario(scenario))
        throw not_a_trolley_scenario("a trolley scenario has only certain or impossible outcomes");

    std::vector<double> deaths;
    for (const auto& a : scenario.actions)
    {
        double d = 0.0;
        for (const auto& o : a.outcomes)
            if (o.probability.value() == 1.0)
                d += fatality_count(o);
        deaths.push_back(d);
    }
    if (nearly_equal(deaths[0], deaths[1]))
        return scenario.actions[break_tie(scenario, {0, 1})].id;
    return scenario.actions[deaths[0] < deaths[1] ? 0 : 1].id;
}

Comparison compare(const Scenario& scenario, const Hierarchy& hierarchy)
{
    Scenario prepared = prepare(scenario);
    auto penalty_of = [&](const std::string& id) { return cumulative_risk(prepared.action(id)).penalty; };

    Comparison out;
    prepared.selection_mode = SelectionMode::expected;
    const auto expected = select_action(prepared).chosen_action;
    out.rows.push_back({"risk_expected", expected, penalty_of(expected), 0.0});

    prepared.selection_mode = SelectionMode::robust_worst_case;
    const auto robust = select_action(prepared).chosen_action;
    out.rows.push_back({"risk_robust", robust, penalty_of(robust), 0.0});

    const auto deontological = decide_deontological(prepared, hierarchy).action_id;
    out.rows.push_back({"deontological", deontological, penalty_of(deontological), 0.0});

    if (is_trolley_scenario(prepared))
    {
        const auto trolley = decide_trolley(prepared);
        out.rows.push_back({"trolley", trolley, penalty_of(trolley), 0.0});
    }

    const double base = out.rows.front().expected_penalty;
    for (auto& row : out.rows)
    {
        row.gap = row.expected_penalty - base;
        out.divergent = out.divergent || row.action_id != expected;
        out.max_gap = std::max(out.max_gap, row.gap);
    }
    return out;
}

} // namespace avrisk::baselines
