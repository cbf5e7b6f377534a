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

#include "avrisk/risk.hpp"
#include "avrisk/scenario.hpp"

namespace avrisk
{

/// Copy of the scenario in which every party withholds the attributes the fairness policy
/// excludes. Attribute values stay on the party; only their modifier factors are dropped
/// from decisions. Throws unknown_attribute if the policy names a key outside the schema.
Scenario redact(const Scenario& scenario);

/// Effective scenario for deciding: monetized magnitudes, attribute modifiers (minus
/// withheld ones) and certainty weighting baked into each outcome's magnitude and
/// probability, with a note per adjustment.
Scenario apply_valuation(const Scenario& scenario);

/// apply_valuation(redact(scenario)).
Scenario prepare(const Scenario& scenario);

/// select_action(prepare(scenario)).
DecisionResult decide(const Scenario& scenario);

struct InvarianceWitness
{
    std::map<std::string, std::string> assignment_a; // party id -> attribute value
    std::string chosen_a;
    std::map<std::string, std::string> assignment_b;
    std::string chosen_b;
};

struct InvarianceReport
{
    std::string attribute;
    bool invariant = true;
    std::size_t runs = 0;
    std::vector<InvarianceWitness> witnesses;
};

/// Re-decides the scenario for every assignment of `values` to the parties carrying
/// `attribute` and reports whether the chosen action ever changes.
///
/// All parties that have the attribute are perturbed jointly, so the number of runs is
/// values.size() raised to the number of such parties. Throws std::invalid_argument when
/// fewer than two values are given and unknown_attribute when the key is not in schema.
InvarianceReport exclusion_invariance_check(const Scenario& scenario, const std::string& attribute,
                                            const std::vector<std::string>& values);

} // namespace avrisk
