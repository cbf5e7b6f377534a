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

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "avrisk/types.hpp"

namespace avrisk
{

/// Monetization constants. Injury costs have no built-in values and must be supplied per scenario.
struct MagnitudeSchedule
{
    double vsl_usd = 9'400'000.0;
    double travel_time_usd_per_person_hour = 13.30;
    std::map<std::string, double> injury_cost_table;

    friend bool operator==(const MagnitudeSchedule&, const MagnitudeSchedule&) = default;
};

enum class WeightingMode
{
    linear,
    exponential,
};

/// How the value of a fatality scales with the probability that it occurs.
///
/// Linear weighting is the classic expectation value V * p. Exponential weighting uses
/// V * p * exp(gamma * p), so the effective value of a life rises as death becomes more
/// certain; at gamma = ln 10 a certain death weighs ten times its low-probability rate.
struct CertaintyWeighting
{
    WeightingMode mode = WeightingMode::linear;
    double gamma = std::numbers::ln10;

    /// Multiplier applied to the base value at probability p. Always 1 in linear mode.
    double value_factor(Probability p) const
    {
        return mode == WeightingMode::linear ? 1.0 : std::exp(gamma * p.value());
    }

    friend bool operator==(const CertaintyWeighting&, const CertaintyWeighting&) = default;
};

enum class ModifierTarget
{
    fatality_probability,
    magnitude,
};

/// Factor applied when a party attribute equals a given value.
struct CategoricalModifier
{
    std::string attribute;
    std::string equals;
    double factor = 1.0;
    ModifierTarget target = ModifierTarget::fatality_probability;

    friend bool operator==(const CategoricalModifier&, const CategoricalModifier&) = default;
};

/// Numeric attribute mapped to a factor by geometric interpolation between two anchors,
/// clamped to the anchor factors outside [x_lo, x_hi].
struct AnchorCurve
{
    std::string attribute;
    double x_lo = 0.0;
    double factor_lo = 1.0;
    double x_hi = 1.0;
    double factor_hi = 1.0;
    ModifierTarget target = ModifierTarget::fatality_probability;

    double factor_at(double x) const;

    friend bool operator==(const AnchorCurve&, const AnchorCurve&) = default;
};

struct ModifierTable
{
    std::vector<CategoricalModifier> categorical;
    std::vector<AnchorCurve> curves;

    /// Product of every rule matching (attribute, value) for the given target; 1 when none match.
    double factor(std::string_view attribute, std::string_view value,
                  ModifierTarget target = ModifierTarget::fatality_probability) const;

    /// Product over all of a party's attributes, skipping the ones it withholds.
    double party_factor(const Party& party, ModifierTarget target) const;

    bool mentions(std::string_view attribute) const;

    ModifierTable merged_with(const ModifierTable& other) const;

    friend bool operator==(const ModifierTable&, const ModifierTable&) = default;
};

/// Relative fatality risks from traffic-safety statistics: intoxicated x2, female x1.28,
/// and age 20 -> 1.0 rising geometrically to age 70 -> 3.0.
ModifierTable default_modifier_table();

Magnitude monetize(const Consequence& consequence, const MagnitudeSchedule& schedule);

/// Fatality penalty of base_value at probability p under the weighting. Zero at p = 0.
double certainty_weighted_penalty(Probability p, double base_value, const CertaintyWeighting& weighting);

/// base_p scaled by the party's matching fatality factors, clamped to 1.
Probability apply_fatality_modifiers(Probability base_p, const Party& party, const ModifierTable& table);

std::string_view to_string(WeightingMode mode);
std::string_view to_string(ModifierTarget target);
std::optional<WeightingMode> parse_weighting_mode(std::string_view text);
std::optional<ModifierTarget> parse_modifier_target(std::string_view text);

} // namespace avrisk
