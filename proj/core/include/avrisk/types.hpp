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

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace avrisk
{

/// A probability in [0, 1]. Construction from an out-of-range or NaN value throws.
class Probability
{
public:
    constexpr Probability() = default;

    explicit Probability(double value) : value_(value)
    {
        if (!(value >= 0.0 && value <= 1.0))
            throw std::domain_error("probability outside [0, 1]");
    }

    /// Saturates into [0, 1]; NaN maps to 0.
    static Probability clamped(double value)
    {
        if (!(value > 0.0))
            return Probability{};
        return Probability(value > 1.0 ? 1.0 : value);
    }

    constexpr double value() const noexcept { return value_; }

    friend constexpr bool operator==(Probability, Probability) = default;
    friend constexpr auto operator<=>(Probability, Probability) = default;

private:
    double value_ = 0.0;
};

enum class MagnitudeUnit
{
    abstract,
    usd,
    statistical_lives,
};

struct Magnitude
{
    double value = 0.0;
    MagnitudeUnit unit = MagnitudeUnit::abstract;

    friend bool operator==(const Magnitude&, const Magnitude&) = default;
};

/// Bounds on the point probability of an outcome.
struct ProbabilityUncertainty
{
    Probability lo;
    Probability hi;

    friend bool operator==(const ProbabilityUncertainty&, const ProbabilityUncertainty&) = default;
};

/// Physical consequences of an outcome, monetized into a usd magnitude.
struct Consequence
{
    double fatalities = 0.0;
    std::map<std::string, double> injuries; // injury class -> count
    double person_hours = 0.0;

    friend bool operator==(const Consequence&, const Consequence&) = default;
};

struct Outcome
{
    std::string id;
    std::string description;
    double magnitude = 0.0;
    // Set when the file states a unit explicitly; must match the scenario unit.
    std::optional<MagnitudeUnit> unit;
    // When present, magnitude is derived from it with the scenario's schedule.
    std::optional<Consequence> consequence;
    Probability probability;
    // Source expression when the probability was written as a formula; empty for literals.
    std::string probability_expr;
    std::optional<ProbabilityUncertainty> uncertainty;
    std::optional<std::string> affected_party;
    std::optional<std::string> exclusive_group;
    bool fatal = false;
    // Notes written by valuation when effective values are computed. Never serialized.
    std::vector<std::string> adjustments;

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct ActionAlternative
{
    std::string id;
    std::string label;
    bool is_hold_course = false;
    std::vector<Outcome> outcomes;

    const Outcome* find_outcome(std::string_view outcome_id) const;

    friend bool operator==(const ActionAlternative&, const ActionAlternative&) = default;
};

enum class Role
{
    occupant,
    pedestrian,
    cyclist,
    other_driver,
    object,
};

struct Party
{
    std::string id;
    Role role = Role::object;
    std::map<std::string, std::string> attributes;
    bool voluntary_exposure = false;
    bool informed = false;
    bool is_beneficiary = false;
    bool is_decision_maker = false;
    // Attributes present on the party whose modifier factors are withheld from decisions.
    std::set<std::string> withheld;

    bool has_attribute(std::string_view key) const { return attributes.find(std::string(key)) != attributes.end(); }

    friend bool operator==(const Party&, const Party&) = default;
};

std::string_view to_string(MagnitudeUnit unit);
std::string_view to_string(Role role);
std::optional<MagnitudeUnit> parse_unit(std::string_view text);
std::optional<Role> parse_role(std::string_view text);

/// Relative equality used for tie detection and conservation checks.
inline bool nearly_equal(double a, double b, double rel_tol = 1e-9)
{
    if (a == b)
        return true;
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= rel_tol * scale;
}

} // namespace avrisk
