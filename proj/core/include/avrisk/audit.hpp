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

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "avrisk/risk.hpp"
#include "avrisk/scenario.hpp"

namespace avrisk::audit
{

struct RiskDistribution
{
    std::string action_id;
    std::map<std::string, double> shares; // party id -> expected penalty
    double total = 0.0;
    std::vector<std::string> warnings;
};

/// Analytic per-party sums of risk penalties for one action of prepare(scenario).
/// Outcomes without an affected party are pooled under "environment".
RiskDistribution risk_distribution(const Scenario& scenario, const std::string& action_id);

/// share under b minus share under a for every party in either distribution.
std::map<std::string, double> risk_transfer(const Scenario& scenario, const std::string& action_a,
                                            const std::string& action_b);

/// Max over min of the strictly positive shares; 1 means perfectly even.
/// Throws no_exposed_parties when no share is positive.
double fairness_index(const RiskDistribution& distribution);

struct HanssonEntry
{
    int number = 0;
    std::string question;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::string answer;
};

struct HanssonReport
{
    std::string scenario;
    std::string chosen_action;
    std::vector<HanssonEntry> entries; // always seven
};

/// The seven ethical-risk questions, verbatim and in their published order.
const std::array<std::string, 7>& hansson_questions();

HanssonReport hansson_report(const Scenario& scenario, const DecisionResult& decision);

} // namespace avrisk::audit
