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

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "avrisk/scenario.hpp"

namespace avrisk::baselines
{

/// Ordered protected classes for the rule-based controller, highest priority first.
struct Hierarchy
{
    std::vector<std::set<Role>> classes;

    /// {pedestrian, cyclist}, {other_driver, occupant}, {object}
    static Hierarchy defaults();

    /// Index of the class containing the role; throws std::invalid_argument if unmapped.
    std::size_t class_of(Role role) const;

    /// Empty when the classes are disjoint and cover every role; otherwise a reason.
    std::string check() const;
};

struct DeontologicalOptions
{
    // Resolve ties left after the class cascade by expected penalty before the
    // hold-course/id tie policy.
    bool expected_cost_fallback = false;
};

struct DeontologicalDecision
{
    std::string action_id;
    std::vector<std::vector<double>> zero_harm; // [action][class], scenario order
    std::string rationale;
};

/// Probability that no outcome with positive magnitude harms a party in `roles`.
/// Exclusive groups contribute 1 - (sum of their harming members).
double zero_harm_probability(const Scenario& scenario, const ActionAlternative& action, const std::set<Role>& roles);

/// Chooses the action that maximizes the probability of zero harm to the highest class,
/// cascading to lower classes on ties. Expected cost is ignored unless the fallback is set.
/// Reads probabilities as stored in the scenario; throws empty_action_set.
DeontologicalDecision decide_deontological(const Scenario& scenario, const Hierarchy& hierarchy = Hierarchy::defaults(),
                                           const DeontologicalOptions& options = {});

/// Certain fatalities of an outcome: its consequence fatality count, else 1 for a fatal
/// outcome and 0 otherwise.
double fatality_count(const Outcome& outcome);

/// Classic two-option chooser over certain outcomes: fewer certain fatalities wins, ties go
/// to the hold-course/id tie policy. Throws not_a_trolley_scenario unless there are
/// exactly two actions and every probability is 0 or 1.
std::string decide_trolley(const Scenario& scenario);

bool is_trolley_scenario(const Scenario& scenario);

struct DeciderRow
{
    std::string decider; // risk_expected, risk_robust, deontological, trolley
    std::string action_id;
    double expected_penalty = 0.0;
    double gap = 0.0; // expected_penalty minus the risk_expected choice's penalty
};

struct Comparison
{
    std::vector<DeciderRow> rows;
    bool divergent = false;
    double max_gap = 0.0;
};

/// Runs every applicable decider on the scenario. Expected penalties are cumulative_risk
/// of the chosen action in prepare(scenario).
Comparison compare(const Scenario& scenario, const Hierarchy& hierarchy = Hierarchy::defaults());

} // namespace avrisk::baselines
