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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avrisk/scenario.hpp"

namespace avrisk::dsl
{

struct SourceSpan
{
    int line = 1;
    int column = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity
{
    error,
    warning,
};

enum class DiagnosticCode
{
    syntax_error,
    unknown_reference,
    probability_out_of_range,
    duplicate_id,
    invalid_value,
    missing_field,
    exclusive_group_overflow,
    unit_mismatch,
    unknown_attribute,
    unknown_injury_class,
    empty_action_set,
};

struct Diagnostic
{
    Severity severity = Severity::error;
    DiagnosticCode code = DiagnosticCode::syntax_error;
    std::string message;
    SourceSpan span;
};

std::string_view to_string(DiagnosticCode code);
std::string_view to_string(Severity severity);

/// "line:column: error[code]: message"
std::string format(const Diagnostic& diagnostic, std::string_view file_name = {});

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Where each entity of a parsed scenario was declared. Keys are "scenario",
/// "party/<id>", "action/<id>", "outcome/<action>/<id>" and "<entity>#<field>" for
/// individual entries.
using SourceMap = std::map<std::string, SourceSpan>;

struct ParseResult
{
    std::optional<Scenario> scenario; // set when there are no error diagnostics
    std::vector<Diagnostic> diagnostics;
    SourceMap source_map;

    bool ok() const { return scenario.has_value(); }
};

/// Parses scenario text and validates the result. The grammar is documented in
/// docs/scenario-format.md.
ParseResult parse(std::string_view text);

/// Checks every cross-reference and invariant of a scenario. Spans come from source_map
/// when given; otherwise diagnostics point at 1:1.
std::vector<Diagnostic> validate(const Scenario& scenario, const SourceMap* source_map = nullptr);

/// Canonical text: [scenario] header, parameters, parties, actions with their outcomes,
/// then policy, weighting, schedule and modifier sections. Deterministic.
std::string serialize(const Scenario& scenario);

/// Evaluates a probability expression: numbers, percentages, parameter names, + - * /
/// and parentheses. Returns nullopt and sets error on failure.
std::optional<double> evaluate_expression(std::string_view expr, const std::map<std::string, double>& parameters,
                                          std::string* error = nullptr);

/// Parses a plain decimal or a percentage ("12.5%"). Percentages are converted by decimal
/// shifting, so "0.01%" yields exactly the double nearest to 0.0001.
std::optional<double> parse_number_or_percent(std::string_view text);

/// Shortest text that reads back to the same double.
std::string format_double(double value);

} // namespace avrisk::dsl
