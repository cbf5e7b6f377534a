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

#include "avrisk/scenario.hpp"

#include "avrisk/errors.hpp"

namespace avrisk
{

FairnessPolicy FairnessPolicy::defaults()
{
    FairnessPolicy policy;
    policy.excluded_attributes = {"helmet", "sex", "age", "vehicle_cost_class"};
    policy.rationale = {
        {"helmet", "protective equipment must not make a road user a preferred target"},
        {"sex", "demographic attribute; not a basis for allocating harm"},
        {"age", "demographic attribute; not a basis for allocating harm"},
        {"vehicle_cost_class", "vehicle price correlates with owner income"},
    };
    return policy;
}

const std::set<std::string>& builtin_attributes()
{
    static const std::set<std::string> keys{"helmet", "intoxicated", "sex", "age", "vehicle_cost_class",
                                            "vehicle_mass_class"};
    return keys;
}

const Party* Scenario::find_party(std::string_view id) const
{
    for (const auto& p : parties)
        if (p.id == id)
            return &p;
    return nullptr;
}

const ActionAlternative* Scenario::find_action(std::string_view id) const
{
    for (const auto& a : actions)
        if (a.id == id)
            return &a;
    return nullptr;
}

const ActionAlternative& Scenario::action(std::string_view id) const
{
    if (const auto* a = find_action(id))
        return *a;
    throw unknown_action(std::string(id));
}

bool Scenario::schema_contains(std::string_view key) const
{
    const std::string k(key);
    return builtin_attributes().count(k) > 0 || attribute_schema.count(k) > 0;
}

ModifierTable Scenario::effective_modifiers() const
{
    if (!default_modifiers)
        return modifiers;
    return default_modifier_table().merged_with(modifiers);
}

std::string_view to_string(SelectionMode mode)
{
    return mode == SelectionMode::expected ? "expected" : "robust_worst_case";
}

std::optional<SelectionMode> parse_selection_mode(std::string_view text)
{
    if (text == "expected")
        return SelectionMode::expected;
    if (text == "robust_worst_case" || text == "robust")
        return SelectionMode::robust_worst_case;
    return std::nullopt;
}

} // namespace avrisk
