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

#include "avrisk/valuation.hpp"

#include <charconv>

#include "avrisk/errors.hpp"

namespace avrisk
{

namespace
{

std::optional<double> to_number(std::string_view text)
{
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        return std::nullopt;
    return value;
}

} // namespace

double AnchorCurve::factor_at(double x) const
{
    if (x <= x_lo)
        return factor_lo;
    if (x >= x_hi)
        return factor_hi;
    const double t = (x - x_lo) / (x_hi - x_lo);
    return factor_lo * std::pow(factor_hi / factor_lo, t);
}

double ModifierTable::factor(std::string_view attribute, std::string_view value, ModifierTarget target) const
{
    double product = 1.0;
    for (const auto& rule : categorical)
        if (rule.target == target && rule.attribute == attribute && rule.equals == value)
            product *= rule.factor;
    for (const auto& curve : curves)
    {
        if (curve.target != target || curve.attribute != attribute)
            continue;
        // non-numeric values never match a curve
        if (auto x = to_number(value))
            product *= curve.factor_at(*x);
    }
    return product;
}

double ModifierTable::party_factor(const Party& party, ModifierTarget target) const
{
    double product = 1.0;
    for (const auto& [key, value] : party.attributes)
        if (party.withheld.count(key) == 0)
            product *= factor(key, value, target);
    return product;
}

bool ModifierTable::mentions(std::string_view attribute) const
{
    for (const auto& rule : categorical)
        if (rule.attribute == attribute)
            return true;
    for (const auto& curve : curves)
        if (curve.attribute == attribute)
            return true;
    return false;
}

ModifierTable ModifierTable::merged_with(const ModifierTable& other) const
{
    ModifierTable merged = *this;
    merged.categorical.insert(merged.categorical.end(), other.categorical.begin(), other.categorical.end());
    merged.curves.insert(merged.curves.end(), other.curves.begin(), other.curves.end());
    return merged;
}

ModifierTable default_modifier_table()
{
    ModifierTable table;
    table.categorical = {
        {"intoxicated", "true", 2.0, ModifierTarget::fatality_probability},
        {"sex", "female", 1.28, ModifierTarget::fatality_probability},
    };
    table.curves = {
        {"age", 20.0, 1.0, 70.0, 3.0, ModifierTarget::fatality_probability},
    };
    return table;
}

Magnitude monetize(const Consequence& consequence, const MagnitudeSchedule& schedule)
{
    double total = consequence.fatalities * schedule.vsl_usd;
    for (const auto& [injury_class, count] : consequence.injuries)
    {
        auto it = schedule.injury_cost_table.find(injury_class);
        if (it == schedule.injury_cost_table.end())
            throw unknown_injury_class(injury_class);
        total += count * it->second;
    }
    total += consequence.person_hours * schedule.travel_time_usd_per_person_hour;
    return {total, MagnitudeUnit::usd};
}

double certainty_weighted_penalty(Probability p, double base_value, const CertaintyWeighting& weighting)
{
    return base_value * p.value() * weighting.value_factor(p);
}

Probability apply_fatality_modifiers(Probability base_p, const Party& party, const ModifierTable& table)
{
    return Probability::clamped(base_p.value() * table.party_factor(party, ModifierTarget::fatality_probability));
}

std::string_view to_string(WeightingMode mode) { return mode == WeightingMode::linear ? "linear" : "exponential"; }

std::string_view to_string(ModifierTarget target)
{
    return target == ModifierTarget::fatality_probability ? "fatality_probability" : "magnitude";
}

std::optional<WeightingMode> parse_weighting_mode(std::string_view text)
{
    if (text == "linear")
        return WeightingMode::linear;
    if (text == "exponential")
        return WeightingMode::exponential;
    return std::nullopt;
}

std::optional<ModifierTarget> parse_modifier_target(std::string_view text)
{
    if (text == "fatality_probability")
        return ModifierTarget::fatality_probability;
    if (text == "magnitude")
        return ModifierTarget::magnitude;
    return std::nullopt;
}

} // namespace avrisk
