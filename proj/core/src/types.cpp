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

#include "avrisk/types.hpp"

#include <array>
#include <utility>

namespace avrisk
{

namespace
{

constexpr std::array<std::pair<MagnitudeUnit, std::string_view>, 3> unit_names{{
    {MagnitudeUnit::abstract, "abstract"},
    {MagnitudeUnit::usd, "usd"},
    {MagnitudeUnit::statistical_lives, "statistical_lives"},
}};

constexpr std::array<std::pair<Role, std::string_view>, 5> role_names{{
    {Role::occupant, "occupant"},
    {Role::pedestrian, "pedestrian"},
    {Role::cyclist, "cyclist"},
    {Role::other_driver, "other_driver"},
    {Role::object, "object"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value)
{
    for (const auto& [e, name] : table)
        if (e == value)
            return name;
    return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> value_of(const std::array<std::pair<Enum, std::string_view>, N>& table, std::string_view text)
{
    for (const auto& [e, name] : table)
        if (name == text)
            return e;
    return std::nullopt;
}

} // namespace

const Outcome* ActionAlternative::find_outcome(std::string_view outcome_id) const
{
    for (const auto& o : outcomes)
        if (o.id == outcome_id)
            return &o;
    return nullptr;
}

std::string_view to_string(MagnitudeUnit unit) { return name_of(unit_names, unit); }
std::string_view to_string(Role role) { return name_of(role_names, role); }
std::optional<MagnitudeUnit> parse_unit(std::string_view text) { return value_of(unit_names, text); }
std::optional<Role> parse_role(std::string_view text) { return value_of(role_names, text); }

} // namespace avrisk
