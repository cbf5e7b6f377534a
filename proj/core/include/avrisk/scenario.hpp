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

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "avrisk/types.hpp"
#include "avrisk/valuation.hpp"

namespace avrisk
{

/// Attributes whose modifier factors must not influence decisions.
struct FairnessPolicy
{
    std::set<std::string> excluded_attributes;
    std::map<std::string, std::string> rationale;

    /// helmet, sex, age and vehicle_cost_class, each with a short rationale.
    static FairnessPolicy defaults();

    friend bool operator==(const FairnessPolicy&, const FairnessPolicy&) = default;
};

enum class SelectionMode
{
    expected,
    robust_worst_case,
};

/// Attribute keys every scenario schema contains without declaring them.
const std::set<std::string>& builtin_attributes();

struct Scenario
{
    std::string name;
    std::string description;
    MagnitudeUnit unit = MagnitudeUnit::abstract;
    // Declared attribute keys in addition to builtin_attributes().
    std::set<std::string> attribute_schema;
    // Named probabilities usable in outcome probability expressions.
    std::map<std::string, double> parameters;
    std::vector<Party> parties;
    std::vector<ActionAlternative> actions;
    FairnessPolicy fairness = FairnessPolicy::defaults();
    CertaintyWeighting weighting;
    SelectionMode selection_mode = SelectionMode::expected;
    MagnitudeSchedule schedule;
    bool default_modifiers = true;
    // Scenario-specific rules, applied on top of the defaults when default_modifiers is set.
    ModifierTable modifiers;

    const Party* find_party(std::string_view id) const;
    const ActionAlternative* find_action(std::string_view id) const;
    const ActionAlternative& action(std::string_view id) const; // throws unknown_action

    bool schema_contains(std::string_view key) const;

    /// The rule set decisions use: defaults (when enabled) followed by scenario rules.
    ModifierTable effective_modifiers() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

std::string_view to_string(SelectionMode mode);
std::optional<SelectionMode> parse_selection_mode(std::string_view text);

} // namespace avrisk
