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

#include "avrisk/fairness.hpp"

#include <cstdio>
#include <stdexcept>

#include "avrisk/errors.hpp"

namespace avrisk
{

namespace
{

std::string number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

// "x2 (intoxicated=true), x1.28 (sex=female)" for the attributes that move the factor.
std::string describe_factors(const Party& party, const ModifierTable& table, ModifierTarget target)
{
    std::string text;
    for (const auto& [key, value] : party.attributes)
    {
        if (party.withheld.count(key))
            continue;
        const double f = table.factor(key, value, target);
        if (f == 1.0)
            continue;
        text += (text.empty() ? "" : ", ") + ("x" + number(f)) + " (" + key + "=" + value + ")";
    }
    return text;
}

void check_policy(const Scenario& scenario)
{
    for (const auto& key : scenario.fairness.excluded_attributes)
        if (!scenario.schema_contains(key))
            throw unknown_attribute(key);
}

} // namespace

Scenario redact(const Scenario& scenario)
{
    check_policy(scenario);
    Scenario out = scenario;
    for (auto& party : out.parties)
        for (const auto& key : out.fairness.excluded_attributes)
            if (party.has_attribute(key))
                party.withheld.insert(key);
    return out;
}

Scenario apply_valuation(const Scenario& scenario)
{
    Scenario out = scenario;
    const ModifierTable table = scenario.effective_modifiers();

    for (auto& action : out.actions)
    {
        for (auto& outcome : action.outcomes)
        {
            if (outcome.consequence)
            {
                outcome.magnitude = monetize(*outcome.consequence, scenario.schedule).value;
                outcome.adjustments.push_back("monetized to " + number(outcome.magnitude) + " usd");
            }

            const Party* party = outcome.affected_party ? scenario.find_party(*outcome.affected_party) : nullptr;
            if (!party)
                continue;

            const double m = table.party_factor(*party, ModifierTarget::magnitude);
            if (m != 1.0)
            {
                outcome.magnitude *= m;
                outcome.adjustments.push_back("magnitude " + describe_factors(*party, table, ModifierTarget::magnitude));
            }

            if (!outcome.fatal)
                continue;
            const double f = table.party_factor(*party, ModifierTarget::fatality_probability);
            if (f != 1.0)
            {
                outcome.probability = apply_fatality_modifiers(outcome.probability, *party, table);
                if (outcome.uncertainty)
                {
                    outcome.uncertainty->lo = Probability::clamped(outcome.uncertainty->lo.value() * f);
                    outcome.uncertainty->hi = Probability::clamped(outcome.uncertainty->hi.value() * f);
                }
                outcome.adjustments.push_back("fatality p " +
                                              describe_factors(*party, table, ModifierTarget::fatality_probability));
            }
        }

        // Modifiers can push an exclusive group past certainty; scale it back to sum 1.
        std::map<std::string, double> group_sum;
        for (const auto& outcome : action.outcomes)
            if (outcome.exclusive_group)
                group_sum[*outcome.exclusive_group] += outcome.probability.value();
        for (auto& outcome : action.outcomes)
        {
            if (!outcome.exclusive_group)
                continue;
            const double sum = group_sum[*outcome.exclusive_group];
            if (sum <= 1.0)
                continue;
            outcome.probability = Probability::clamped(outcome.probability.value() / sum);
            if (outcome.uncertainty)
            {
                outcome.uncertainty->lo = Probability::clamped(outcome.uncertainty->lo.value() / sum);
                outcome.uncertainty->hi = Probability::clamped(outcome.uncertainty->hi.value() / sum);
            }
            outcome.adjustments.push_back("group '" + *outcome.exclusive_group + "' renormalized from " + number(sum));
        }

        if (scenario.weighting.mode == WeightingMode::linear)
            continue;
        for (auto& outcome : action.outcomes)
        {
            if (!outcome.fatal || outcome.magnitude < 0.0)
                continue;
            const double w = scenario.weighting.value_factor(outcome.probability);
            outcome.magnitude *= w;
            outcome.adjustments.push_back("certainty weight x" + number(w));
        }
    }
    return out;
}

Scenario prepare(const Scenario& scenario) { return apply_valuation(redact(scenario)); }

DecisionResult decide(const Scenario& scenario) { return select_action(prepare(scenario)); }

InvarianceReport exclusion_invariance_check(const Scenario& scenario, const std::string& attribute,
                                            const std::vector<std::string>& values)
{
    if (values.size() < 2)
        throw std::invalid_argument("invariance check needs at least two attribute values");
    if (!scenario.schema_contains(attribute))
        throw unknown_attribute(attribute);

    std::vector<std::size_t> carriers;
    for (std::size_t i = 0; i < scenario.parties.size(); ++i)
        if (scenario.parties[i].has_attribute(attribute))
            carriers.push_back(i);
    // Nobody carries it: perturb everyone, so the check still exercises the attribute.
    if (carriers.empty())
        for (std::size_t i = 0; i < scenario.parties.size(); ++i)
            carriers.push_back(i);

    std::size_t runs = 1;
    for (std::size_t i = 0; i < carriers.size(); ++i)
    {
        runs *= values.size();
        if (runs > 65536)
            throw std::invalid_argument("too many attribute assignments for an exhaustive invariance check");
    }

    InvarianceReport report;
    report.attribute = attribute;
    report.runs = runs;

    std::map<std::string, std::string> first_assignment;
    std::string first_choice;
    for (std::size_t run = 0; run < runs; ++run)
    {
        Scenario variant = scenario;
        std::map<std::string, std::string> assignment;
        std::size_t code = run;
        for (auto idx : carriers)
        {
            auto& party = variant.parties[idx];
            party.attributes[attribute] = values[code % values.size()];
            assignment[party.id] = values[code % values.size()];
            code /= values.size();
        }
        const auto chosen = decide(variant).chosen_action;
        if (run == 0)
        {
            first_assignment = std::move(assignment);
            first_choice = chosen;
            continue;
        }
        if (chosen != first_choice)
        {
            report.invariant = false;
            report.witnesses.push_back({first_assignment, first_choice, std::move(assignment), chosen});
        }
    }
    return report;
}

} // namespace avrisk
