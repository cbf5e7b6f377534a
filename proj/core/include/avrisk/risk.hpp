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

#include <string>
#include <vector>

#include "avrisk/scenario.hpp"
#include "avrisk/types.hpp"

namespace avrisk
{

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct ActionRisk
{
    double penalty = 0.0;
    Interval interval;
};

/// Expectation value of an outcome: magnitude times probability.
double risk_penalty(const Outcome& outcome);

/// Penalty range implied by the outcome's probability bounds; a point when it has none.
Interval penalty_interval(const Outcome& outcome);

ActionRisk cumulative_risk(const ActionAlternative& action);

struct TraceEntry
{
    std::string action_id;
    std::string outcome_id;
    std::string description;
    double magnitude = 0.0;
    double probability = 0.0;
    std::vector<std::string> modifiers;
    double contribution = 0.0;
};

struct DecisionTrace
{
    std::vector<TraceEntry> entries;
    std::string rationale;
};

struct ActionScore
{
    std::string action_id;
    std::string label;
    bool is_hold_course = false;
    double penalty = 0.0;
    Interval penalty_interval;
    std::size_t outcome_count = 0;
};

struct DecisionResult
{
    std::string chosen_action;
    SelectionMode mode = SelectionMode::expected;
    std::vector<ActionScore> per_action; // scenario order
    bool tie_broken = false;
    DecisionTrace trace;

    const ActionScore& score(std::string_view action_id) const;
};

/// Picks the action with the smallest criterion value (penalty, or interval upper bound in
/// robust mode). Equal values within 1e-9 relative are ties, resolved in favour of the
/// hold-course action and then the lexicographically smallest id.
///
/// Consumes the probabilities and magnitudes exactly as stored; see prepare() for the
/// pipeline that applies fairness redaction and valuation first.
DecisionResult select_action(const Scenario& scenario);

/// Index of the preferred action among candidates under the tie policy.
std::size_t break_tie(const Scenario& scenario, const std::vector<std::size_t>& candidates);

/// Renders per-action tables (event, magnitude, probability, penalty) and the rationale.
std::string decision_trace(const DecisionResult& result);

} // namespace avrisk
