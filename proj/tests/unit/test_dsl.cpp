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

#include <gtest/gtest.h>

#include <random>

#include "avrisk/catalog.hpp"
#include "avrisk/dsl.hpp"
#include "avrisk/risk.hpp"
#include "support/generators.hpp"

namespace
{

using namespace avrisk;
using dsl::DiagnosticCode;

constexpr const char* minimal = R"([scenario]
name = minimal

[party]
id = walker
role = pedestrian

[action]
id = go
hold_course = true

[outcome]
id = hit
magnitude = 10
probability = 0.25
party = walker
)";

std::string with_outcome_line(const std::string& replace, const std::string& by)
{
    std::string text = minimal;
    text.replace(text.find(replace), replace.size(), by);
    return text;
}

bool has_code(const dsl::ParseResult& r, DiagnosticCode code)
{
    for (const auto& d : r.diagnostics)
        if (d.code == code && d.severity == dsl::Severity::error)
            return true;
    return false;
}

TEST(Parse, MinimalFile)
{
    const auto r = dsl::parse(minimal);
    ASSERT_TRUE(r.ok()) << (r.diagnostics.empty() ? "" : dsl::format(r.diagnostics[0]));
    EXPECT_EQ(r.scenario->parties.size(), 1u);
    EXPECT_EQ(r.scenario->actions.size(), 1u);
    EXPECT_EQ(r.scenario->actions[0].outcomes.size(), 1u);
    EXPECT_EQ(r.scenario->actions[0].outcomes[0].probability.value(), 0.25);
}

TEST(Parse, MissingPolicySectionUsesDefaults)
{
    EXPECT_EQ(dsl::parse(minimal).scenario->fairness, FairnessPolicy::defaults());
}

TEST(Parse, LaneChangeTablePenalties)
{
    const auto r = dsl::parse(find_catalog_entry("lane_change_truck")->source);
    ASSERT_TRUE(r.ok());
    const double expected[] = {0.5, 2, 3, 1, 1, 0.5, 50};
    const auto& outcomes = r.scenario->actions.at(0).outcomes;
    ASSERT_EQ(outcomes.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i)
        EXPECT_NEAR(risk_penalty(outcomes[i]), expected[i], expected[i] * 1e-9);
}

TEST(Parse, ProbabilityOutOfRangePointsAtLine)
{
    const auto r = dsl::parse(with_outcome_line("probability = 0.25", "probability = 1.3"));
    EXPECT_FALSE(r.ok());
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].code, DiagnosticCode::probability_out_of_range);
    EXPECT_EQ(r.diagnostics[0].span.line, 15);
    EXPECT_GT(r.diagnostics[0].span.column, 1);
}

TEST(Parse, PercentagesAreExact)
{
    EXPECT_EQ(dsl::parse_number_or_percent("0.01%"), 0.0001);
    EXPECT_EQ(dsl::parse_number_or_percent("90%"), 0.9);
    EXPECT_EQ(dsl::parse_number_or_percent("12.5%"), 0.125);
    EXPECT_EQ(dsl::parse_number_or_percent("100%"), 1.0);
    EXPECT_FALSE(dsl::parse_number_or_percent("abc"));
    EXPECT_FALSE(dsl::parse_number_or_percent("5%%"));
}

TEST(Parse, Expressions)
{
    const std::map<std::string, double> params{{"a", 0.9}, {"b", 0.7}};
    EXPECT_DOUBLE_EQ(*dsl::evaluate_expression("a * b", params), 0.63);
    EXPECT_DOUBLE_EQ(*dsl::evaluate_expression("(1 - 98%) * 80%", params), 0.016);
    EXPECT_DOUBLE_EQ(*dsl::evaluate_expression("-a + 1", params), 1 - 0.9);
    std::string why;
    EXPECT_FALSE(dsl::evaluate_expression("a * c", params, &why));
    EXPECT_NE(why.find("unknown parameter"), std::string::npos);
    EXPECT_FALSE(dsl::evaluate_expression("a *", params));
    EXPECT_FALSE(dsl::evaluate_expression("(a", params));
}

TEST(Parse, UnknownParameterIsUnknownReference)
{
    EXPECT_TRUE(has_code(dsl::parse(with_outcome_line("probability = 0.25", "probability = q * 0.5")),
                         DiagnosticCode::unknown_reference));
}

TEST(Parse, SyntaxErrors)
{
    EXPECT_TRUE(has_code(dsl::parse("[scenario\nname = x\n"), DiagnosticCode::syntax_error));
    EXPECT_TRUE(has_code(dsl::parse("[scenario]\nname x\n"), DiagnosticCode::syntax_error));
    EXPECT_TRUE(has_code(dsl::parse("[nonsense]\n"), DiagnosticCode::syntax_error));
    EXPECT_TRUE(has_code(dsl::parse(with_outcome_line("magnitude = 10", "magnitude = 10\ncolour = red")),
                         DiagnosticCode::syntax_error));
}

TEST(Parse, MissingScenarioSection) { EXPECT_TRUE(has_code(dsl::parse(""), DiagnosticCode::missing_field)); }

TEST(Parse, EmptyActionSet)
{
    EXPECT_TRUE(has_code(dsl::parse("[scenario]\nname = nothing\n"), DiagnosticCode::empty_action_set));
}

TEST(Parse, DuplicateIds)
{
    std::string text = minimal;
    text += "\n[action]\nid = go\n";
    EXPECT_TRUE(has_code(dsl::parse(text), DiagnosticCode::duplicate_id));
}

TEST(Parse, UnknownAttribute)
{
    EXPECT_TRUE(has_code(dsl::parse(with_outcome_line("role = pedestrian", "role = pedestrian\nattr.shoe_size = 9")),
                         DiagnosticCode::unknown_attribute));
}

TEST(Parse, DeclaredAttributeIsAccepted)
{
    auto text = with_outcome_line("name = minimal", "name = minimal\nattributes = shoe_size");
    text = text.replace(text.find("role = pedestrian"), 17, "role = pedestrian\nattr.shoe_size = 9");
    const auto r = dsl::parse(text);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.scenario->parties[0].attributes.at("shoe_size"), "9");
}

TEST(Parse, UnitMismatch)
{
    EXPECT_TRUE(has_code(dsl::parse(with_outcome_line("magnitude = 10", "magnitude = 10\nunit = usd")),
                         DiagnosticCode::unit_mismatch));
}

TEST(Parse, ConsequenceMonetizes)
{
    auto text = with_outcome_line("magnitude = 10", "fatalities = 1\nperson_hours = 10");
    text.replace(text.find("name = minimal"), 14, "name = minimal\nunit = usd");
    const auto r = dsl::parse(text);
    ASSERT_TRUE(r.ok()) << dsl::format(r.diagnostics.at(0));
    EXPECT_DOUBLE_EQ(r.scenario->actions[0].outcomes[0].magnitude, 9'400'000 + 133.0);
}

TEST(Parse, UnknownInjuryClass)
{
    auto text = with_outcome_line("magnitude = 10", "injury.whiplash = 1");
    text.replace(text.find("name = minimal"), 14, "name = minimal\nunit = usd");
    EXPECT_TRUE(has_code(dsl::parse(text), DiagnosticCode::unknown_injury_class));
}

TEST(Validate, CatalogIsClean)
{
    for (const auto* list : {&catalog(), &catalog_extras()})
        for (const auto& entry : *list)
        {
            const auto diags = dsl::validate(entry.scenario);
            EXPECT_FALSE(dsl::has_errors(diags)) << entry.name;
        }
}

TEST(Validate, ExclusiveGroupOverflow)
{
    auto s = *dsl::parse(minimal).scenario;
    auto& outcomes = s.actions[0].outcomes;
    outcomes[0].probability = Probability(0.7);
    outcomes[0].exclusive_group = "g";
    auto second = outcomes[0];
    second.id = "other";
    second.probability = Probability(0.5);
    outcomes.push_back(second);
    const auto diags = dsl::validate(s);
    ASSERT_TRUE(dsl::has_errors(diags));
    EXPECT_EQ(diags[0].code, DiagnosticCode::exclusive_group_overflow);
}

TEST(Validate, UnknownParty)
{
    const auto r = dsl::parse(with_outcome_line("party = walker", "party = ghost"));
    ASSERT_TRUE(has_code(r, DiagnosticCode::unknown_reference));
    EXPECT_EQ(r.diagnostics[0].span.line, 16);
}

TEST(Validate, TwoHoldCourseActions)
{
    std::string text = minimal;
    text += "\n[action]\nid = other\nhold_course = true\n";
    EXPECT_TRUE(has_code(dsl::parse(text), DiagnosticCode::invalid_value));
}

TEST(Validate, NonFiniteMagnitude)
{
    EXPECT_TRUE(has_code(dsl::parse(with_outcome_line("magnitude = 10", "magnitude = inf")),
                         DiagnosticCode::invalid_value));
}

TEST(Format, LineColumnPrefix)
{
    const auto r = dsl::parse(with_outcome_line("probability = 0.25", "probability = 1.3"));
    const auto text = dsl::format(r.diagnostics.at(0), "bad.scn");
    EXPECT_EQ(text.rfind("bad.scn:15:", 0), 0u) << text;
    EXPECT_NE(text.find("error[ProbabilityOutOfRange]"), std::string::npos);
}

TEST(Serialize, CatalogRoundTrip)
{
    for (const auto* list : {&catalog(), &catalog_extras()})
        for (const auto& entry : *list)
        {
            const auto text = dsl::serialize(entry.scenario);
            const auto r = dsl::parse(text);
            ASSERT_TRUE(r.ok()) << entry.name << "\n" << text;
            EXPECT_EQ(*r.scenario, entry.scenario) << entry.name;
        }
}

TEST(Serialize, Deterministic)
{
    const auto& s = find_catalog_entry("pedestrian_blind_spot")->scenario;
    EXPECT_EQ(dsl::serialize(s), dsl::serialize(s));
}

TEST(Serialize, CanonicalOrder)
{
    const auto text = dsl::serialize(find_catalog_entry("motorcyclists_helmet")->scenario);
    const auto party = text.find("[party]");
    const auto action = text.find("[action]");
    const auto policy = text.find("[policy]");
    ASSERT_NE(party, std::string::npos);
    ASSERT_NE(action, std::string::npos);
    ASSERT_NE(policy, std::string::npos);
    EXPECT_LT(text.find("[scenario]"), party);
    EXPECT_LT(party, action);
    EXPECT_LT(action, policy);
}

TEST(Serialize, ShortestDoubles)
{
    EXPECT_EQ(dsl::format_double(0.1), "0.1");
    EXPECT_EQ(dsl::format_double(9.4e6), "9400000");
    EXPECT_EQ(std::stod(dsl::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Catalog, Contents)
{
    ASSERT_EQ(catalog().size(), 5u);
    const auto& truck = find_catalog_entry("lane_change_truck")->scenario;
    const auto* row = truck.actions.at(0).find_outcome("hit_pedestrian");
    ASSERT_NE(row, nullptr);
    EXPECT_EQ(row->magnitude, 100000.0);
    EXPECT_EQ(row->probability.value(), 0.00001);

    const auto& blind = find_catalog_entry("pedestrian_blind_spot")->scenario;
    EXPECT_EQ(blind.parameters.at("p_pedestrian"), 0.90);
    EXPECT_EQ(blind.parameters.at("p_run"), 0.70);
    EXPECT_EQ(blind.parameters.at("p_blindspot_clear"), 0.98);

    const auto& tunnel = find_catalog_entry("tunnel_child")->scenario;
    int holds = 0;
    for (const auto& a : tunnel.actions)
        holds += a.is_hold_course;
    EXPECT_EQ(holds, 1);
    EXPECT_NE(tunnel.find_action("stay"), nullptr);
    EXPECT_NE(tunnel.find_action("swerve"), nullptr);
}

// ---- properties -------------------------------------------------------------

TEST(DslProperties, GeneratedScenariosValidate)
{
    std::mt19937_64 rng(41);
    for (int i = 0; i < 1000; ++i)
    {
        const auto s = gen::random_scenario(rng);
        const auto diags = dsl::validate(s);
        ASSERT_FALSE(dsl::has_errors(diags)) << dsl::format(diags[0]) << "\n" << dsl::serialize(s);
    }
}

TEST(DslProperties, RoundTripGeneratedScenarios)
{
    std::mt19937_64 rng(42);
    for (int i = 0; i < 1000; ++i)
    {
        const auto s = gen::random_scenario(rng);
        const auto text = dsl::serialize(s);
        const auto r = dsl::parse(text);
        ASSERT_TRUE(r.ok()) << dsl::format(r.diagnostics.at(0)) << "\n" << text;
        ASSERT_EQ(*r.scenario, s) << text;
        EXPECT_EQ(dsl::serialize(*r.scenario), text);
    }
}

TEST(DslProperties, DiagnosticsCarrySpans)
{
    std::mt19937_64 rng(43);
    const std::string base = dsl::serialize(find_catalog_entry("pedestrian_blind_spot")->scenario);
    const std::vector<std::string> junk = {"= =", "[", "probability = 7", "party = nobody", "magnitude = x",
                                           "[outcome]", "id = ?", "hold_course = maybe"};
    int line_count = 1;
    for (char c : base)
        line_count += c == '\n';
    for (int i = 0; i < 500; ++i)
    {
        std::vector<std::string> lines;
        std::size_t start = 0;
        for (std::size_t k = 0; k <= base.size(); ++k)
            if (k == base.size() || base[k] == '\n')
            {
                lines.push_back(base.substr(start, k - start));
                start = k + 1;
            }
        const auto at = static_cast<std::size_t>(gen::pick(rng, 0, static_cast<int>(lines.size()) - 1));
        lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(at),
                     junk[static_cast<std::size_t>(gen::pick(rng, 0, static_cast<int>(junk.size()) - 1))]);
        std::string text;
        for (const auto& l : lines)
            text += l + "\n";
        const auto r = dsl::parse(text);
        for (const auto& d : r.diagnostics)
        {
            EXPECT_GE(d.span.line, 1);
            EXPECT_LE(d.span.line, line_count + 2);
            EXPECT_GE(d.span.column, 1);
        }
    }
}

} // namespace
