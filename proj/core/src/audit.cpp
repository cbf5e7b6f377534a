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

#include "avrisk/audit.hpp"

#include <algorithm>
#include <cstdio>

#include "avrisk/errors.hpp"
#include "avrisk/fairness.hpp"
#include "avrisk/simulate.hpp"

namespace avrisk::audit
{

namespace
{

std::string number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string join(const std::vector<std::string>& items, const char* empty = "none")
{
    if (items.empty())
        return empty;
    std::string out;
    for (const auto& item : items)
        out += (out.empty() ? "" : ", ") + item;
    return out;
}

RiskDistribution distribution_of(const Scenario& prepared, const ActionAlternative& action)
{
    RiskDistribution d;
    d.action_id = action.id;
    std::vector<std::string> unassigned;
    for (const auto& o : action.outcomes)
    {
        const bool known = o.affected_party && prepared.find_party(*o.affected_party);
        const std::string owner = known ? *o.affected_party : sim::environment_party;
        if (!known)
            unassigned.push_back(o.id);
        d.shares[owner] += risk_penalty(o);
    }
    d.total = cumulative_risk(action).penalty;
    if (!unassigned.empty())
        d.warnings.push_back("UnassignedOutcome: no affected party for " + join(unassigned) + "; pooled under '" +
                             sim::environment_party + "'");
    return d;
}

} // namespace

RiskDistribution risk_distribution(const Scenario& scenario, const std::string& action_id)
{
    const Scenario prepared = prepare(scenario);
    return distribution_of(prepared, prepared.action(action_id));
}

std::map<std::string, double> risk_transfer(const Scenario& scenario, const std::string& action_a,
                                            const std::string& action_b)
{
    const Scenario prepared = prepare(scenario);
    const auto a = distribution_of(prepared, prepared.action(action_a));
    const auto b = distribution_of(prepared, prepared.action(action_b));
    std::map<std::string, double> delta;
    for (const auto& [party, share] : a.shares)
        delta[party] -= share;
    for (const auto& [party, share] : b.shares)
        delta[party] += share;
    return delta;
}

double fairness_index(const RiskDistribution& distribution)
{
    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
    for (const auto& [party, share] : distribution.shares)
    {
        if (!(share > 0.0))
            continue;
        lo = any ? std::min(lo, share) : share;
        hi = any ? std::max(hi, share) : share;
        any = true;
    }
    if (!any)
        throw no_exposed_parties();
    return hi / lo;
}

const std::array<std::string, 7>& hansson_questions()
{
    static const std::array<std::string, 7> questions{
        "To what extent do the risk-exposed benefit from the risk exposure?",
        "Is the distribution of risks and benefits fair?",
        "Can the distribution of risks and benefits be made less fair by redistribution or by compensation?",
        "To what extent is the risk exposure decided by those who run the risk?",
        "Do the risk-exposed have access to all relevant information about the risk?",
        "Are there risk-exposed persons who cannot be informed or included in the decision process?",
        "Does the decision-maker benefit from other people's risk exposure?",
    };
    return questions;
}

HanssonReport hansson_report(const Scenario& scenario, const DecisionResult& decision)
{
    const Scenario prepared = prepare(scenario);
    const auto& chosen = prepared.action(decision.chosen_action);
    const auto dist = distribution_of(prepared, chosen);

    HanssonReport report;
    report.scenario = scenario.name;
    report.chosen_action = decision.chosen_action;
    for (std::size_t i = 0; i < hansson_questions().size(); ++i)
        report.entries.push_back({static_cast<int>(i + 1), hansson_questions()[i], {}, {}});

    // parties with positive expected harm under the chosen action
    std::vector<const Party*> exposed;
    for (const auto& p : prepared.parties)
    {
        auto it = dist.shares.find(p.id);
        if (it != dist.shares.end() && it->second > 0.0)
            exposed.push_back(&p);
    }

    {
        auto& q = report.entries[0];
        std::vector<std::string> non_beneficiaries;
        for (const auto* p : exposed)
        {
            q.inputs.emplace_back(p->id, "share " + number(dist.shares.at(p->id)) + ", beneficiary " +
                                             yes_no(p->is_beneficiary));
            if (!p->is_beneficiary)
                non_beneficiaries.push_back(p->id);
        }
        q.inputs.emplace_back("exposed non-beneficiaries", join(non_beneficiaries));
        q.answer = exposed.empty()               ? "no party is exposed under the chosen action"
                   : non_beneficiaries.empty()   ? "every exposed party benefits from the exposure"
                                                 : std::to_string(non_beneficiaries.size()) + " of " +
                                                     std::to_string(exposed.size()) +
                                                     " exposed parties do not benefit from the exposure";
    }
    {
        auto& q = report.entries[1];
        try
        {
            const double index = fairness_index(dist);
            q.inputs.emplace_back("fairness_index", number(index));
            q.answer = index == 1.0 ? "expected harm is spread evenly over the exposed parties"
                                    : "the most exposed party carries " + number(index) +
                                          " times the expected harm of the least exposed";
        }
        catch (const no_exposed_parties&)
        {
            q.inputs.emplace_back("fairness_index", "n/a");
            q.answer = "no party carries positive expected harm";
        }
    }
    {
        auto& q = report.entries[2];
        for (const auto& other : prepared.actions)
        {
            if (other.id == chosen.id)
                continue;
            const auto b = distribution_of(prepared, other);
            std::map<std::string, double> delta;
            for (const auto& [party, share] : dist.shares)
                delta[party] -= share;
            for (const auto& [party, share] : b.shares)
                delta[party] += share;
            std::string row;
            for (const auto& [party, d] : delta)
                row += (row.empty() ? "" : ", ") + party + " " + (d >= 0 ? "+" : "") + number(d);
            q.inputs.emplace_back("transfer " + chosen.id + " -> " + other.id, row.empty() ? "none" : row);
        }
        q.answer = "For designers: could redistribution or compensation make this distribution more fair? "
                   "The question is quoted verbatim; 'less fair' is most likely a typo for 'more fair'.";
    }
    {
        auto& q = report.entries[3];
        std::vector<std::string> self_decided;
        for (const auto* p : exposed)
        {
            q.inputs.emplace_back(p->id, "voluntary " + yes_no(p->voluntary_exposure) + ", decision-maker " +
                                             yes_no(p->is_decision_maker));
            if (p->voluntary_exposure || p->is_decision_maker)
                self_decided.push_back(p->id);
        }
        q.answer = std::to_string(self_decided.size()) + " of " + std::to_string(exposed.size()) +
                   " exposed parties chose their exposure";
    }
    {
        auto& q = report.entries[4];
        std::vector<std::string> uninformed;
        for (const auto& p : prepared.parties)
            if (!p.informed)
                uninformed.push_back(p.id);
        q.inputs.emplace_back("informed", uninformed.empty() ? "all informed" : "not informed: " + join(uninformed));
        q.answer = uninformed.empty() ? "every party has the relevant risk information"
                                      : std::to_string(uninformed.size()) + " parties lack the risk information";
    }
    {
        auto& q = report.entries[5];
        std::vector<std::string> excluded;
        for (const auto* p : exposed)
            if (!p->informed)
                excluded.push_back(p->id);
        q.inputs.emplace_back("exposed and uninformed", join(excluded));
        q.answer = excluded.empty() ? "no exposed party is left out of the decision"
                                    : "exposed parties outside the decision: " + join(excluded);
    }
    {
        auto& q = report.entries[6];
        std::vector<std::string> makers, benefiting_makers, others_exposed;
        for (const auto& p : prepared.parties)
            if (p.is_decision_maker)
            {
                makers.push_back(p.id);
                if (p.is_beneficiary)
                    benefiting_makers.push_back(p.id);
            }
        for (const auto* p : exposed)
            if (!p->is_decision_maker)
                others_exposed.push_back(p->id);
        q.inputs.emplace_back("decision-makers", join(makers));
        q.inputs.emplace_back("decision-makers who benefit", join(benefiting_makers));
        q.inputs.emplace_back("other parties exposed", join(others_exposed));
        q.answer = !benefiting_makers.empty() && !others_exposed.empty()
                       ? "yes: " + join(benefiting_makers) + " benefit while " + join(others_exposed) + " carry risk"
                       : "no decision-maker benefits from another party's exposure";
    }
    return report;
}

} // namespace avrisk::audit
