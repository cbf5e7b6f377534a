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

#include "avrisk/risk.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

#include "avrisk/errors.hpp"

namespace avrisk
{

namespace
{

std::string number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

double criterion(const ActionScore& score, SelectionMode mode)
{
    return mode == SelectionMode::expected ? score.penalty : score.penalty_interval.hi;
}

} // namespace

double risk_penalty(const Outcome& outcome) { return outcome.magnitude * outcome.probability.value(); }

Interval penalty_interval(const Outcome& outcome)
{
    if (!outcome.uncertainty)
    {
        const double point = risk_penalty(outcome);
        return {point, point};
    }
    const double a = outcome.magnitude * outcome.uncertainty->lo.value();
    const double b = outcome.magnitude * outcome.uncertainty->hi.value();
    return {std::min(a, b), std::max(a, b)};
}

ActionRisk cumulative_risk(const ActionAlternative& action)
{
    ActionRisk risk;
    for (const auto& outcome : action.outcomes)
    {
        risk.penalty += risk_penalty(outcome);
        const auto iv = penalty_interval(outcome);
        risk.interval.lo += iv.lo;
        risk.interval.hi += iv.hi;
    }
    // Summation of the endpoints can round past the point sum by an ulp.
    risk.interval.lo = std::min(risk.interval.lo, risk.penalty);
    risk.interval.hi = std::max(risk.interval.hi, risk.penalty);
    return risk;
}

const ActionScore& DecisionResult::score(std::string_view action_id) const
{
    for (const auto& s : per_action)
        if (s.action_id == action_id)
            return s;
    throw unknown_action(std::string(action_id));
}

std::size_t break_tie(const Scenario& scenario, const std::vector<std::size_t>& candidates)
{
    return *std::min_element(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = scenario.actions[a];
        const auto& y = scenario.actions[b];
        if (x.is_hold_course != y.is_hold_course)
            return x.is_hold_course;
        return x.id < y.id;
    });
}

DecisionResult select_action(const Scenario& scenario)
{
    if (scenario.actions.empty())
        throw empty_action_set();

    DecisionResult result;
    result.mode = scenario.selection_mode;
    for (const auto& action : scenario.actions)
    {
        const auto risk = cumulative_risk(action);
        result.per_action.push_back(
            {action.id, action.label, action.is_hold_course, risk.penalty, risk.interval, action.outcomes.size()});
        for (const auto& outcome : action.outcomes)
            result.trace.entries.push_back({action.id, outcome.id, outcome.description, outcome.magnitude,
                                            outcome.probability.value(), outcome.adjustments, risk_penalty(outcome)});
    }

    double best = criterion(result.per_action.front(), result.mode);
    for (const auto& s : result.per_action)
        best = std::min(best, criterion(s, result.mode));

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < result.per_action.size(); ++i)
        if (nearly_equal(criterion(result.per_action[i], result.mode), best))
            candidates.push_back(i);

    const std::size_t chosen = break_tie(scenario, candidates);
    result.chosen_action = scenario.actions[chosen].id;
    result.tie_broken = candidates.size() > 1;

    std::ostringstream why;
    why << "chose '" << result.chosen_action << "' with "
        << (result.mode == SelectionMode::expected ? "the lowest expected penalty "
                                                   : "the lowest worst-case penalty ")
        << number(best);
    if (result.tie_broken)
    {
        why << "; tied with";
        for (auto i : candidates)
            if (i != chosen)
                why << " '" << scenario.actions[i].id << "'";
        why << ", broken by " << (scenario.actions[chosen].is_hold_course ? "hold-course preference" : "action id order");
    }
    result.trace.rationale = why.str();
    return result;
}

std::string decision_trace(const DecisionResult& result)
{
    std::ostringstream out;
    for (const auto& score : result.per_action)
    {
        out << "action " << score.action_id;
        if (!score.label.empty())
            out << " (" << score.label << ")";
        if (score.is_hold_course)
            out << " [hold course]";
        out << "\n";

        std::vector<std::array<std::string, 5>> rows;
        rows.push_back({"event", "magnitude", "probability", "penalty", "modifiers"});
        for (const auto& e : result.trace.entries)
        {
            if (e.action_id != score.action_id)
                continue;
            std::string mods;
            for (const auto& m : e.modifiers)
                mods += (mods.empty() ? "" : "; ") + m;
            rows.push_back({e.description.empty() ? e.outcome_id : e.description, number(e.magnitude),
                            number(e.probability), number(e.contribution), mods});
        }

        std::array<std::size_t, 5> width{};
        for (const auto& r : rows)
            for (std::size_t c = 0; c < r.size(); ++c)
                width[c] = std::max(width[c], r[c].size());
        for (const auto& r : rows)
        {
            out << "  ";
            for (std::size_t c = 0; c < r.size(); ++c)
            {
                const bool numeric = c >= 1 && c <= 3;
                const auto pad = std::string(width[c] - r[c].size(), ' ');
                out << (numeric ? pad + r[c] : r[c] + (c + 1 < r.size() ? pad : "")) << (c + 1 < r.size() ? "  " : "");
            }
            out << "\n";
        }
        out << "  total penalty " << number(score.penalty) << " [" << number(score.penalty_interval.lo) << ", "
            << number(score.penalty_interval.hi) << "]\n\n";
    }
    out << "decision: " << result.trace.rationale << "\n";
    return out.str();
}

} // namespace avrisk
