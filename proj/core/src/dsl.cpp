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

#include "avrisk/dsl.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "avrisk/errors.hpp"

namespace avrisk::dsl
{

namespace
{

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

bool is_identifier(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
            return false;
    return true;
}

bool is_single_line_text(std::string_view s)
{
    if (s.find_first_of("\r\n") != std::string_view::npos)
        return false;
    return trim(s).size() == s.size();
}

std::optional<double> parse_plain_number(std::string_view text)
{
    if (text.empty())
        return std::nullopt;
    // from_chars rejects a leading '+', accept it for hand-written files
    if (text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value, std::chars_format::general);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value))
        return std::nullopt;
    return value;
}

std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> items;
    while (true)
    {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty())
            items.emplace_back(item);
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    return items;
}

std::string join(const std::set<std::string>& items)
{
    std::string out;
    for (const auto& item : items)
        out += (out.empty() ? "" : ", ") + item;
    return out;
}

// ---------------------------------------------------------------------------------------
// probability expressions

class ExpressionParser
{
public:
    ExpressionParser(std::string_view text, const std::map<std::string, double>& parameters)
        : text_(text), parameters_(parameters)
    {
    }

    std::optional<double> run(std::string* error)
    {
        auto value = expr();
        skip_space();
        if (value && pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        if (!error_.empty())
        {
            if (error)
                *error = error_;
            return std::nullopt;
        }
        return value;
    }

private:
    std::optional<double> expr()
    {
        auto lhs = term();
        while (lhs)
        {
            skip_space();
            if (pos_ >= text_.size() || (text_[pos_] != '+' && text_[pos_] != '-'))
                break;
            const char op = text_[pos_++];
            auto rhs = term();
            if (!rhs)
                return std::nullopt;
            lhs = op == '+' ? *lhs + *rhs : *lhs - *rhs;
        }
        return lhs;
    }

    std::optional<double> term()
    {
        auto lhs = unary();
        while (lhs)
        {
            skip_space();
            if (pos_ >= text_.size() || (text_[pos_] != '*' && text_[pos_] != '/'))
                break;
            const char op = text_[pos_++];
            auto rhs = unary();
            if (!rhs)
                return std::nullopt;
            if (op == '/' && *rhs == 0.0)
                return fail("division by zero");
            lhs = op == '*' ? *lhs * *rhs : *lhs / *rhs;
        }
        return lhs;
    }

    std::optional<double> unary()
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '-')
        {
            ++pos_;
            auto v = unary();
            return v ? std::optional<double>(-*v) : std::nullopt;
        }
        return atom();
    }

    std::optional<double> atom()
    {
        skip_space();
        if (pos_ >= text_.size())
            return fail("expression ends early");
        const char c = text_[pos_];
        if (c == '(')
        {
            ++pos_;
            auto v = expr();
            skip_space();
            if (!v)
                return std::nullopt;
            if (pos_ >= text_.size() || text_[pos_] != ')')
                return fail("missing ')'");
            ++pos_;
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
        {
            const auto start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                ++pos_;
            // exponent, only when followed by a digit or sign+digit
            if (pos_ + 1 < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E'))
            {
                std::size_t p = pos_ + 1;
                if (p < text_.size() && (text_[p] == '+' || text_[p] == '-'))
                    ++p;
                if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p])))
                {
                    pos_ = p;
                    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                        ++pos_;
                }
            }
            if (pos_ < text_.size() && text_[pos_] == '%')
                ++pos_;
            auto v = parse_number_or_percent(text_.substr(start, pos_ - start));
            if (!v)
                return fail("bad number '" + std::string(text_.substr(start, pos_ - start)) + "'");
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
        {
            const auto start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name(text_.substr(start, pos_ - start));
            auto it = parameters_.find(name);
            if (it == parameters_.end())
                return fail("unknown parameter '" + name + "'");
            return it->second;
        }
        return fail("unexpected '" + std::string(1, c) + "'");
    }

    void skip_space()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    std::optional<double> fail(std::string message)
    {
        if (error_.empty())
            error_ = std::move(message);
        return std::nullopt;
    }

    std::string_view text_;
    const std::map<std::string, double>& parameters_;
    std::size_t pos_ = 0;
    std::string error_;
};

// ---------------------------------------------------------------------------------------
// section tokenizer

struct Entry
{
    std::string key;
    std::string value;
    SourceSpan key_span;
    SourceSpan value_span;
};

struct Section
{
    std::string name;
    SourceSpan span;
    std::vector<Entry> entries;
};

const std::set<std::string>& section_names()
{
    static const std::set<std::string> names{"scenario", "parameters", "schedule", "weighting", "policy",
                                             "modifier", "curve",      "party",    "action",    "outcome"};
    return names;
}

std::vector<Section> tokenize(std::string_view text, std::vector<Diagnostic>& diags)
{
    std::vector<Section> sections;
    if (text.substr(0, 3) == "\xEF\xBB\xBF")
        text.remove_prefix(3);

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r')
            raw.remove_suffix(1);

        const auto body = trim(raw);
        const auto first = raw.find_first_not_of(" \t");
        const int col = first == std::string_view::npos ? 1 : static_cast<int>(first) + 1;
        if (body.empty() || body.front() == '#' || body.front() == ';')
            continue;

        if (body.front() == '[')
        {
            if (body.back() != ']')
            {
                diags.push_back({Severity::error, DiagnosticCode::syntax_error, "section header is missing ']'",
                                 {line_no, col}});
                continue;
            }
            const std::string name(trim(body.substr(1, body.size() - 2)));
            if (!section_names().count(name))
            {
                diags.push_back({Severity::error, DiagnosticCode::syntax_error, "unknown section [" + name + "]",
                                 {line_no, col}});
                sections.push_back({"<unknown>", {line_no, col}, {}});
                continue;
            }
            sections.push_back({name, {line_no, col}, {}});
            continue;
        }

        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
        {
            diags.push_back({Severity::error, DiagnosticCode::syntax_error, "expected 'key = value' or '[section]'",
                             {line_no, col}});
            continue;
        }
        const auto key = trim(body.substr(0, eq));
        const auto value = trim(body.substr(eq + 1));
        if (key.empty())
        {
            diags.push_back({Severity::error, DiagnosticCode::syntax_error, "missing key before '='", {line_no, col}});
            continue;
        }
        if (sections.empty())
        {
            diags.push_back({Severity::error, DiagnosticCode::syntax_error,
                             "entry '" + std::string(key) + "' appears before any section", {line_no, col}});
            continue;
        }
        auto& section = sections.back();
        if (section.name == "<unknown>")
            continue;
        bool duplicate = false;
        for (const auto& e : section.entries)
            duplicate = duplicate || e.key == key;
        if (duplicate)
        {
            diags.push_back({Severity::error, DiagnosticCode::syntax_error,
                             "key '" + std::string(key) + "' repeated in [" + section.name + "]", {line_no, col}});
            continue;
        }
        const int value_col =
            static_cast<int>(value.empty() ? raw.size() + 1 : static_cast<std::size_t>(value.data() - raw.data()) + 1);
        section.entries.push_back({std::string(key), std::string(value), {line_no, col}, {line_no, value_col}});
    }
    return sections;
}

// ---------------------------------------------------------------------------------------
// scenario builder

class Builder
{
public:
    Builder(std::vector<Diagnostic>& diags, SourceMap& map) : diags_(diags), map_(map) {}

    Scenario build(const std::vector<Section>& sections)
    {
        scenario_.fairness = FairnessPolicy::defaults();
        // parameters first so expressions anywhere in the file can use them
        for (const auto& s : sections)
            if (s.name == "parameters")
                parameters(s);
        for (const auto& s : sections)
        {
            if (s.name == "scenario")
                header(s);
            else if (s.name == "schedule")
                schedule(s);
            else if (s.name == "weighting")
                weighting(s);
            else if (s.name == "policy")
                policy(s);
            else if (s.name == "modifier")
                modifier(s);
            else if (s.name == "curve")
                curve(s);
            else if (s.name == "party")
                party(s);
            else if (s.name == "action")
                action(s);
            else if (s.name == "outcome")
                outcome(s);
        }
        if (!seen_header_)
            error(DiagnosticCode::missing_field, "missing [scenario] section", {1, 1});

        // [schedule] may come after the outcomes that use it
        for (auto& a : scenario_.actions)
            for (auto& o : a.outcomes)
                if (o.consequence)
                {
                    try
                    {
                        o.magnitude = monetize(*o.consequence, scenario_.schedule).value;
                    }
                    catch (const unknown_injury_class&)
                    {
                        // reported by validate
                    }
                }
        return std::move(scenario_);
    }

private:
    void error(DiagnosticCode code, std::string message, SourceSpan span)
    {
        diags_.push_back({Severity::error, code, std::move(message), span});
    }

    void unknown_key(const Section& s, const Entry& e)
    {
        error(DiagnosticCode::syntax_error, "unknown key '" + e.key + "' in [" + s.name + "]", e.key_span);
    }

    std::optional<double> number(const Entry& e)
    {
        auto v = parse_plain_number(e.value);
        if (!v)
            error(DiagnosticCode::invalid_value, "'" + e.key + "' expects a finite number, got '" + e.value + "'",
                  e.value_span);
        return v;
    }

    std::optional<double> number_or_percent(const Entry& e)
    {
        auto v = parse_number_or_percent(e.value);
        if (!v)
            error(DiagnosticCode::invalid_value, "'" + e.key + "' expects a number or percentage, got '" + e.value + "'",
                  e.value_span);
        return v;
    }

    std::optional<bool> boolean(const Entry& e)
    {
        if (e.value == "true")
            return true;
        if (e.value == "false")
            return false;
        error(DiagnosticCode::invalid_value, "'" + e.key + "' expects true or false, got '" + e.value + "'",
              e.value_span);
        return std::nullopt;
    }

    std::optional<std::string> identifier(const Entry& e)
    {
        if (is_identifier(e.value))
            return e.value;
        error(DiagnosticCode::invalid_value, "'" + e.value + "' is not a valid identifier", e.value_span);
        return std::nullopt;
    }

    std::optional<Probability> probability(const Entry& e)
    {
        auto v = number_or_percent(e);
        if (!v)
            return std::nullopt;
        return checked_probability(*v, e);
    }

    std::optional<Probability> checked_probability(double v, const Entry& e)
    {
        if (v < 0.0 || v > 1.0)
        {
            error(DiagnosticCode::probability_out_of_range,
                  "probability " + format_double(v) + " is outside [0, 1]", e.value_span);
            return std::nullopt;
        }
        return Probability(v);
    }

    void require(const Section& s, std::initializer_list<const char*> keys)
    {
        for (const char* key : keys)
        {
            bool found = false;
            for (const auto& e : s.entries)
                found = found || e.key == key;
            if (!found)
                error(DiagnosticCode::missing_field, "[" + s.name + "] requires '" + key + "'", s.span);
        }
    }

    static std::optional<std::string_view> suffix(const std::string& key, std::string_view prefix)
    {
        if (key.size() > prefix.size() && std::string_view(key).substr(0, prefix.size()) == prefix)
            return std::string_view(key).substr(prefix.size());
        return std::nullopt;
    }

    void header(const Section& s)
    {
        if (seen_header_)
            error(DiagnosticCode::syntax_error, "[scenario] appears more than once", s.span);
        seen_header_ = true;
        map_["scenario"] = s.span;
        require(s, {"name"});
        for (const auto& e : s.entries)
        {
            map_["scenario." + e.key] = e.value_span;
            if (e.key == "name")
            {
                if (auto id = identifier(e))
                    scenario_.name = *id;
            }
            else if (e.key == "description")
                scenario_.description = e.value;
            else if (e.key == "unit")
            {
                if (auto u = parse_unit(e.value))
                    scenario_.unit = *u;
                else
                    error(DiagnosticCode::invalid_value, "unknown unit '" + e.value + "'", e.value_span);
            }
            else if (e.key == "selection")
            {
                if (auto m = parse_selection_mode(e.value))
                    scenario_.selection_mode = *m;
                else
                    error(DiagnosticCode::invalid_value, "unknown selection mode '" + e.value + "'", e.value_span);
            }
            else if (e.key == "attributes")
            {
                for (auto& key : split_list(e.value))
                    scenario_.attribute_schema.insert(key);
            }
            else if (e.key == "default_modifiers")
            {
                if (auto b = boolean(e))
                    scenario_.default_modifiers = *b;
            }
            else
                unknown_key(s, e);
        }
    }

    void parameters(const Section& s)
    {
        for (const auto& e : s.entries)
        {
            bool ok = !e.key.empty() && (std::isalpha(static_cast<unsigned char>(e.key[0])) || e.key[0] == '_');
            for (char c : e.key)
                ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
            if (!ok)
            {
                error(DiagnosticCode::invalid_value, "parameter name '" + e.key + "' must be [A-Za-z_][A-Za-z0-9_]*",
                      e.key_span);
                continue;
            }
            if (auto v = number_or_percent(e))
            {
                scenario_.parameters[e.key] = *v;
                map_["parameter." + e.key] = e.value_span;
            }
        }
    }

    void schedule(const Section& s)
    {
        for (const auto& e : s.entries)
        {
            map_["schedule." + e.key] = e.value_span;
            if (e.key == "vsl_usd")
            {
                if (auto v = number(e))
                    scenario_.schedule.vsl_usd = *v;
            }
            else if (e.key == "travel_time_usd_per_person_hour")
            {
                if (auto v = number(e))
                    scenario_.schedule.travel_time_usd_per_person_hour = *v;
            }
            else if (auto cls = suffix(e.key, "injury."))
            {
                if (auto v = number(e))
                    scenario_.schedule.injury_cost_table[std::string(*cls)] = *v;
            }
            else
                unknown_key(s, e);
        }
    }

    void weighting(const Section& s)
    {
        for (const auto& e : s.entries)
        {
            map_["weighting." + e.key] = e.value_span;
            if (e.key == "mode")
            {
                if (auto m = parse_weighting_mode(e.value))
                    scenario_.weighting.mode = *m;
                else
                    error(DiagnosticCode::invalid_value, "unknown weighting mode '" + e.value + "'", e.value_span);
            }
            else if (e.key == "gamma")
            {
                if (auto v = number(e))
                    scenario_.weighting.gamma = *v;
            }
            else
                unknown_key(s, e);
        }
    }

    void policy(const Section& s)
    {
        if (!seen_policy_)
            scenario_.fairness = FairnessPolicy{};
        seen_policy_ = true;
        for (const auto& e : s.entries)
        {
            map_["policy." + e.key] = e.value_span;
            if (e.key == "exclude")
            {
                for (auto& key : split_list(e.value))
                    scenario_.fairness.excluded_attributes.insert(key);
            }
            else if (auto key = suffix(e.key, "rationale."))
                scenario_.fairness.rationale[std::string(*key)] = e.value;
            else
                unknown_key(s, e);
        }
    }

    std::optional<ModifierTarget> target(const Entry& e)
    {
        if (auto t = parse_modifier_target(e.value))
            return t;
        error(DiagnosticCode::invalid_value, "unknown modifier target '" + e.value + "'", e.value_span);
        return std::nullopt;
    }

    void modifier(const Section& s)
    {
        require(s, {"attribute", "equals", "factor"});
        CategoricalModifier rule;
        const auto index = scenario_.modifiers.categorical.size();
        map_["modifier#" + std::to_string(index)] = s.span;
        for (const auto& e : s.entries)
        {
            map_["modifier#" + std::to_string(index) + "." + e.key] = e.value_span;
            if (e.key == "attribute")
                rule.attribute = e.value;
            else if (e.key == "equals")
                rule.equals = e.value;
            else if (e.key == "factor")
            {
                if (auto v = number(e))
                    rule.factor = *v;
            }
            else if (e.key == "target")
            {
                if (auto t = target(e))
                    rule.target = *t;
            }
            else
                unknown_key(s, e);
        }
        scenario_.modifiers.categorical.push_back(std::move(rule));
    }

    void curve(const Section& s)
    {
        require(s, {"attribute", "x_lo", "factor_lo", "x_hi", "factor_hi"});
        AnchorCurve c;
        const auto index = scenario_.modifiers.curves.size();
        map_["curve#" + std::to_string(index)] = s.span;
        for (const auto& e : s.entries)
        {
            map_["curve#" + std::to_string(index) + "." + e.key] = e.value_span;
            std::optional<double> v;
            if (e.key == "attribute")
                c.attribute = e.value;
            else if (e.key == "target")
            {
                if (auto t = target(e))
                    c.target = *t;
            }
            else if (e.key == "x_lo" || e.key == "factor_lo" || e.key == "x_hi" || e.key == "factor_hi")
            {
                if ((v = number(e)))
                {
                    if (e.key == "x_lo")
                        c.x_lo = *v;
                    else if (e.key == "factor_lo")
                        c.factor_lo = *v;
                    else if (e.key == "x_hi")
                        c.x_hi = *v;
                    else
                        c.factor_hi = *v;
                }
            }
            else
                unknown_key(s, e);
        }
        scenario_.modifiers.curves.push_back(std::move(c));
    }

    void party(const Section& s)
    {
        require(s, {"id", "role"});
        Party p;
        const std::string prefix = "party#" + std::to_string(scenario_.parties.size());
        map_[prefix] = s.span;
        for (const auto& e : s.entries)
        {
            map_[prefix + "." + e.key] = e.value_span;
            if (e.key == "id")
            {
                if (auto id = identifier(e))
                    p.id = *id;
            }
            else if (e.key == "role")
            {
                if (auto r = parse_role(e.value))
                    p.role = *r;
                else
                    error(DiagnosticCode::invalid_value, "unknown role '" + e.value + "'", e.value_span);
            }
            else if (auto attr = suffix(e.key, "attr."))
                p.attributes[std::string(*attr)] = e.value;
            else if (e.key == "voluntary")
                p.voluntary_exposure = boolean(e).value_or(false);
            else if (e.key == "informed")
                p.informed = boolean(e).value_or(false);
            else if (e.key == "beneficiary")
                p.is_beneficiary = boolean(e).value_or(false);
            else if (e.key == "decision_maker")
                p.is_decision_maker = boolean(e).value_or(false);
            else if (e.key == "withheld")
            {
                for (auto& key : split_list(e.value))
                    p.withheld.insert(key);
            }
            else
                unknown_key(s, e);
        }
        scenario_.parties.push_back(std::move(p));
    }

    void action(const Section& s)
    {
        require(s, {"id"});
        ActionAlternative a;
        const std::string prefix = "action#" + std::to_string(scenario_.actions.size());
        map_[prefix] = s.span;
        for (const auto& e : s.entries)
        {
            map_[prefix + "." + e.key] = e.value_span;
            if (e.key == "id")
            {
                if (auto id = identifier(e))
                    a.id = *id;
            }
            else if (e.key == "label")
                a.label = e.value;
            else if (e.key == "hold_course")
                a.is_hold_course = boolean(e).value_or(false);
            else
                unknown_key(s, e);
        }
        scenario_.actions.push_back(std::move(a));
    }

    void outcome(const Section& s)
    {
        if (scenario_.actions.empty())
        {
            error(DiagnosticCode::syntax_error, "[outcome] must follow an [action]", s.span);
            return;
        }
        require(s, {"id", "probability"});
        auto& action = scenario_.actions.back();
        Outcome o;
        const std::string prefix =
            "outcome#" + std::to_string(scenario_.actions.size() - 1) + "/" + std::to_string(action.outcomes.size());
        map_[prefix] = s.span;

        bool has_magnitude = false;
        Consequence consequence;
        bool has_consequence = false;
        for (const auto& e : s.entries)
        {
            map_[prefix + "." + e.key] = e.value_span;
            if (e.key == "id")
            {
                if (auto id = identifier(e))
                    o.id = *id;
            }
            else if (e.key == "description")
                o.description = e.value;
            else if (e.key == "magnitude")
            {
                has_magnitude = true;
                if (auto v = number(e))
                    o.magnitude = *v;
            }
            else if (e.key == "unit")
            {
                if (auto u = parse_unit(e.value))
                    o.unit = *u;
                else
                    error(DiagnosticCode::invalid_value, "unknown unit '" + e.value + "'", e.value_span);
            }
            else if (e.key == "fatalities")
            {
                has_consequence = true;
                if (auto v = number(e))
                    consequence.fatalities = *v;
            }
            else if (e.key == "person_hours")
            {
                has_consequence = true;
                if (auto v = number(e))
                    consequence.person_hours = *v;
            }
            else if (auto cls = suffix(e.key, "injury."))
            {
                has_consequence = true;
                if (auto v = number(e))
                    consequence.injuries[std::string(*cls)] = *v;
            }
            else if (e.key == "probability")
            {
                if (auto literal = parse_number_or_percent(e.value))
                {
                    if (auto p = checked_probability(*literal, e))
                        o.probability = *p;
                }
                else
                {
                    std::string why;
                    if (auto v = evaluate_expression(e.value, scenario_.parameters, &why))
                    {
                        o.probability_expr = e.value;
                        if (auto p = checked_probability(*v, e))
                            o.probability = *p;
                    }
                    else
                    {
                        const bool unknown = why.rfind("unknown parameter", 0) == 0;
                        error(unknown ? DiagnosticCode::unknown_reference : DiagnosticCode::syntax_error,
                              "probability: " + why, e.value_span);
                    }
                }
            }
            else if (e.key == "uncertainty")
            {
                auto parts = split_list(e.value);
                if (parts.size() != 2)
                {
                    error(DiagnosticCode::syntax_error, "uncertainty expects 'lo, hi'", e.value_span);
                    continue;
                }
                Entry lo = e, hi = e;
                lo.value = parts[0];
                hi.value = parts[1];
                auto plo = probability(lo);
                auto phi = probability(hi);
                if (plo && phi)
                    o.uncertainty = ProbabilityUncertainty{*plo, *phi};
            }
            else if (e.key == "party")
            {
                if (auto id = identifier(e))
                    o.affected_party = *id;
            }
            else if (e.key == "group")
            {
                if (auto id = identifier(e))
                    o.exclusive_group = *id;
            }
            else if (e.key == "fatal")
                o.fatal = boolean(e).value_or(false);
            else
                unknown_key(s, e);
        }

        if (has_magnitude && has_consequence)
            error(DiagnosticCode::syntax_error, "give either 'magnitude' or consequence fields, not both", s.span);
        else if (!has_magnitude && !has_consequence)
            error(DiagnosticCode::missing_field, "[outcome] requires 'magnitude' or consequence fields", s.span);
        if (has_consequence)
            o.consequence = consequence;
        action.outcomes.push_back(std::move(o));
    }

    std::vector<Diagnostic>& diags_;
    SourceMap& map_;
    Scenario scenario_;
    bool seen_header_ = false;
    bool seen_policy_ = false;
};

SourceSpan lookup(const SourceMap* map, std::initializer_list<std::string> keys)
{
    if (map)
        for (const auto& key : keys)
        {
            auto it = map->find(key);
            if (it != map->end())
                return it->second;
        }
    return {1, 1};
}

} // namespace

// ---------------------------------------------------------------------------------------

std::string_view to_string(DiagnosticCode code)
{
    switch (code)
    {
    case DiagnosticCode::syntax_error: return "SyntaxError";
    case DiagnosticCode::unknown_reference: return "UnknownReference";
    case DiagnosticCode::probability_out_of_range: return "ProbabilityOutOfRange";
    case DiagnosticCode::duplicate_id: return "DuplicateId";
    case DiagnosticCode::invalid_value: return "InvalidValue";
    case DiagnosticCode::missing_field: return "MissingField";
    case DiagnosticCode::exclusive_group_overflow: return "ExclusiveGroupOverflow";
    case DiagnosticCode::unit_mismatch: return "UnitMismatch";
    case DiagnosticCode::unknown_attribute: return "UnknownAttribute";
    case DiagnosticCode::unknown_injury_class: return "UnknownInjuryClass";
    case DiagnosticCode::empty_action_set: return "EmptyActionSet";
    }
    return "?";
}

std::string_view to_string(Severity severity) { return severity == Severity::error ? "error" : "warning"; }

std::string format(const Diagnostic& d, std::string_view file_name)
{
    std::ostringstream out;
    if (!file_name.empty())
        out << file_name << ":";
    out << d.span.line << ":" << d.span.column << ": " << to_string(d.severity) << "[" << to_string(d.code)
        << "]: " << d.message;
    return out.str();
}

bool has_errors(const std::vector<Diagnostic>& diagnostics)
{
    for (const auto& d : diagnostics)
        if (d.severity == Severity::error)
            return true;
    return false;
}

std::optional<double> parse_number_or_percent(std::string_view text)
{
    text = trim(text);
    if (text.empty() || text.back() != '%')
        return parse_plain_number(text);
    auto mantissa = trim(text.substr(0, text.size() - 1));
    if (mantissa.empty() || mantissa.find_first_of("eE") != std::string_view::npos)
        return std::nullopt;
    // "12.5" -> "12.5e-2" so the division by 100 happens in decimal, not binary.
    return parse_plain_number(std::string(mantissa) + "e-2");
}

std::string format_double(double value)
{
    if (value == 0.0)
        return "0"; // also folds -0
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::optional<double> evaluate_expression(std::string_view expr, const std::map<std::string, double>& parameters,
                                          std::string* error)
{
    ExpressionParser parser(trim(expr), parameters);
    auto v = parser.run(error);
    if (v && !std::isfinite(*v))
    {
        if (error)
            *error = "expression is not finite";
        return std::nullopt;
    }
    return v;
}

ParseResult parse(std::string_view text)
{
    ParseResult result;
    auto sections = tokenize(text, result.diagnostics);
    Builder builder(result.diagnostics, result.source_map);
    Scenario scenario = builder.build(sections);

    if (!has_errors(result.diagnostics))
    {
        auto more = validate(scenario, &result.source_map);
        result.diagnostics.insert(result.diagnostics.end(), more.begin(), more.end());
    }
    if (!has_errors(result.diagnostics))
        result.scenario = std::move(scenario);
    return result;
}

std::vector<Diagnostic> validate(const Scenario& s, const SourceMap* map)
{
    std::vector<Diagnostic> out;
    auto error = [&](DiagnosticCode code, std::string message, SourceSpan span) {
        out.push_back({Severity::error, code, std::move(message), span});
    };
    auto warning = [&](DiagnosticCode code, std::string message, SourceSpan span) {
        out.push_back({Severity::warning, code, std::move(message), span});
    };
    auto check_text = [&](const std::string& text, const std::string& what, SourceSpan span) {
        if (!is_single_line_text(text))
            error(DiagnosticCode::invalid_value, what + " must be single-line text without surrounding blanks", span);
    };
    auto check_id = [&](const std::string& id, const std::string& what, SourceSpan span) {
        if (!is_identifier(id))
            error(DiagnosticCode::invalid_value, what + " '" + id + "' is not a valid identifier", span);
    };

    const auto header = lookup(map, {"scenario"});
    check_id(s.name, "scenario name", lookup(map, {"scenario.name", "scenario"}));
    check_text(s.description, "scenario description", lookup(map, {"scenario.description", "scenario"}));
    if (s.actions.empty())
        error(DiagnosticCode::empty_action_set, "scenario has no actions", header);

    for (const auto& [key, value] : s.parameters)
        if (!std::isfinite(value))
            error(DiagnosticCode::invalid_value, "parameter '" + key + "' is not finite",
                  lookup(map, {"parameter." + key, "scenario"}));

    // schedule
    if (!(s.schedule.vsl_usd >= 0.0 && std::isfinite(s.schedule.vsl_usd)))
        error(DiagnosticCode::invalid_value, "vsl_usd must be a finite value >= 0",
              lookup(map, {"schedule.vsl_usd", "scenario"}));
    if (!(s.schedule.travel_time_usd_per_person_hour >= 0.0 && std::isfinite(s.schedule.travel_time_usd_per_person_hour)))
        error(DiagnosticCode::invalid_value, "travel_time_usd_per_person_hour must be a finite value >= 0",
              lookup(map, {"schedule.travel_time_usd_per_person_hour", "scenario"}));
    for (const auto& [cls, cost] : s.schedule.injury_cost_table)
        if (!(cost >= 0.0 && std::isfinite(cost)))
            error(DiagnosticCode::invalid_value, "injury cost for '" + cls + "' must be a finite value >= 0",
                  lookup(map, {"schedule.injury." + cls, "scenario"}));

    if (!(s.weighting.gamma >= 0.0 && std::isfinite(s.weighting.gamma)))
        error(DiagnosticCode::invalid_value, "gamma must be a finite value >= 0",
              lookup(map, {"weighting.gamma", "scenario"}));

    for (const auto& key : s.fairness.excluded_attributes)
        if (!s.schema_contains(key))
            error(DiagnosticCode::unknown_attribute, "policy excludes '" + key + "', which is not in the attribute schema",
                  lookup(map, {"policy.exclude", "scenario"}));
    for (const auto& [key, text] : s.fairness.rationale)
        check_text(text, "rationale for '" + key + "'", lookup(map, {"policy.rationale." + key, "scenario"}));

    for (std::size_t i = 0; i < s.modifiers.categorical.size(); ++i)
    {
        const auto& rule = s.modifiers.categorical[i];
        const std::string k = "modifier#" + std::to_string(i);
        if (!s.schema_contains(rule.attribute))
            error(DiagnosticCode::unknown_attribute, "modifier attribute '" + rule.attribute + "' is not in the schema",
                  lookup(map, {k + ".attribute", k}));
        check_text(rule.equals, "modifier value", lookup(map, {k + ".equals", k}));
        if (!(rule.factor > 0.0 && std::isfinite(rule.factor)))
            error(DiagnosticCode::invalid_value, "modifier factor must be finite and > 0", lookup(map, {k + ".factor", k}));
    }
    std::set<std::string> curve_attributes;
    for (std::size_t i = 0; i < s.modifiers.curves.size(); ++i)
    {
        const auto& c = s.modifiers.curves[i];
        const std::string k = "curve#" + std::to_string(i);
        curve_attributes.insert(c.attribute);
        if (!s.schema_contains(c.attribute))
            error(DiagnosticCode::unknown_attribute, "curve attribute '" + c.attribute + "' is not in the schema",
                  lookup(map, {k + ".attribute", k}));
        if (!(c.x_lo < c.x_hi))
            error(DiagnosticCode::invalid_value, "curve needs x_lo < x_hi", lookup(map, {k + ".x_hi", k}));
        if (!(c.factor_lo > 0.0 && c.factor_hi > 0.0))
            error(DiagnosticCode::invalid_value, "curve factors must be > 0", lookup(map, {k + ".factor_lo", k}));
    }
    if (s.default_modifiers)
        for (const auto& c : default_modifier_table().curves)
            curve_attributes.insert(c.attribute);

    std::set<std::string> party_ids;
    for (std::size_t i = 0; i < s.parties.size(); ++i)
    {
        const auto& p = s.parties[i];
        const std::string k = "party#" + std::to_string(i);
        check_id(p.id, "party id", lookup(map, {k + ".id", k}));
        if (!party_ids.insert(p.id).second)
            error(DiagnosticCode::duplicate_id, "duplicate party id '" + p.id + "'", lookup(map, {k + ".id", k}));
        for (const auto& [key, value] : p.attributes)
        {
            const auto span = lookup(map, {k + ".attr." + key, k});
            if (!s.schema_contains(key))
                error(DiagnosticCode::unknown_attribute, "attribute '" + key + "' is not in the scenario schema", span);
            check_id(key, "attribute key", span);
            if (value.empty() || value.find(',') != std::string::npos)
                error(DiagnosticCode::invalid_value, "attribute value must be non-empty and contain no ','", span);
            check_text(value, "attribute value", span);
            if (curve_attributes.count(key) && !parse_plain_number(value))
                warning(DiagnosticCode::invalid_value,
                        "attribute '" + key + "' feeds a numeric curve but '" + value + "' is not a number", span);
        }
        for (const auto& key : p.withheld)
            if (!p.has_attribute(key))
                error(DiagnosticCode::unknown_attribute, "withheld attribute '" + key + "' is not set on the party",
                      lookup(map, {k + ".withheld", k}));
    }

    std::set<std::string> action_ids;
    bool seen_hold = false;
    for (std::size_t ai = 0; ai < s.actions.size(); ++ai)
    {
        const auto& a = s.actions[ai];
        const std::string ak = "action#" + std::to_string(ai);
        check_id(a.id, "action id", lookup(map, {ak + ".id", ak}));
        check_text(a.label, "action label", lookup(map, {ak + ".label", ak}));
        if (!action_ids.insert(a.id).second)
            error(DiagnosticCode::duplicate_id, "duplicate action id '" + a.id + "'", lookup(map, {ak + ".id", ak}));
        if (a.is_hold_course)
        {
            if (seen_hold)
                error(DiagnosticCode::invalid_value, "more than one action is marked hold_course",
                      lookup(map, {ak + ".hold_course", ak}));
            seen_hold = true;
        }
        if (a.outcomes.empty())
            warning(DiagnosticCode::missing_field, "action '" + a.id + "' has no outcomes", lookup(map, {ak}));

        std::set<std::string> outcome_ids;
        std::map<std::string, double> group_sum;
        for (std::size_t oi = 0; oi < a.outcomes.size(); ++oi)
        {
            const auto& o = a.outcomes[oi];
            const std::string k = "outcome#" + std::to_string(ai) + "/" + std::to_string(oi);
            auto at = [&](const std::string& field) { return lookup(map, {k + "." + field, k}); };

            check_id(o.id, "outcome id", at("id"));
            check_text(o.description, "outcome description", at("description"));
            if (!outcome_ids.insert(o.id).second)
                error(DiagnosticCode::duplicate_id, "duplicate outcome id '" + o.id + "' in action '" + a.id + "'",
                      at("id"));
            if (!std::isfinite(o.magnitude))
                error(DiagnosticCode::invalid_value, "magnitude must be finite", at("magnitude"));
            if (o.unit && *o.unit != s.unit)
                error(DiagnosticCode::unit_mismatch,
                      "outcome unit " + std::string(to_string(*o.unit)) + " differs from scenario unit " +
                          std::string(to_string(s.unit)),
                      at("unit"));
            if (o.consequence)
            {
                const auto& c = *o.consequence;
                if (s.unit != MagnitudeUnit::usd)
                    error(DiagnosticCode::unit_mismatch, "consequence fields monetize to usd but the scenario unit is " +
                                                             std::string(to_string(s.unit)),
                          lookup(map, {k + ".fatalities", k + ".person_hours", k}));
                if (!(c.fatalities >= 0.0 && std::isfinite(c.fatalities)))
                    error(DiagnosticCode::invalid_value, "fatalities must be a finite value >= 0", at("fatalities"));
                if (!(c.person_hours >= 0.0 && std::isfinite(c.person_hours)))
                    error(DiagnosticCode::invalid_value, "person_hours must be a finite value >= 0", at("person_hours"));
                for (const auto& [cls, count] : c.injuries)
                {
                    if (!s.schedule.injury_cost_table.count(cls))
                        error(DiagnosticCode::unknown_injury_class,
                              "injury class '" + cls + "' has no cost in [schedule]", at("injury." + cls));
                    if (!(count >= 0.0 && std::isfinite(count)))
                        error(DiagnosticCode::invalid_value, "injury count must be a finite value >= 0",
                              at("injury." + cls));
                }
            }
            if (o.fatal && o.magnitude < 0.0)
                error(DiagnosticCode::invalid_value, "a fatal outcome cannot carry a negative magnitude", at("magnitude"));
            if (o.uncertainty && !(o.uncertainty->lo <= o.probability && o.probability <= o.uncertainty->hi))
                error(DiagnosticCode::invalid_value, "uncertainty bounds must satisfy lo <= probability <= hi",
                      at("uncertainty"));
            if (!o.probability_expr.empty())
            {
                std::string why;
                auto v = evaluate_expression(o.probability_expr, s.parameters, &why);
                if (!v)
                    error(DiagnosticCode::unknown_reference, "probability: " + why, at("probability"));
                else if (*v != o.probability.value())
                    error(DiagnosticCode::invalid_value, "probability does not match its expression", at("probability"));
            }
            if (o.affected_party && !s.find_party(*o.affected_party))
                error(DiagnosticCode::unknown_reference, "outcome names unknown party '" + *o.affected_party + "'",
                      at("party"));
            if (o.exclusive_group)
            {
                check_id(*o.exclusive_group, "group id", at("group"));
                double& sum = group_sum[*o.exclusive_group];
                const bool was_ok = sum <= 1.0 + 1e-12;
                sum += o.probability.value();
                if (was_ok && sum > 1.0 + 1e-12)
                    error(DiagnosticCode::exclusive_group_overflow,
                          "probabilities in exclusive group '" + *o.exclusive_group + "' sum to more than 1",
                          at("probability"));
            }
        }
    }
    return out;
}

std::string serialize(const Scenario& s)
{
    std::ostringstream out;
    auto kv = [&](std::string_view key, std::string_view value) { out << key << " = " << value << "\n"; };
    auto flag = [](bool b) { return b ? "true" : "false"; };

    out << "[scenario]\n";
    kv("name", s.name);
    if (!s.description.empty())
        kv("description", s.description);
    kv("unit", to_string(s.unit));
    kv("selection", to_string(s.selection_mode));
    kv("default_modifiers", flag(s.default_modifiers));
    if (!s.attribute_schema.empty())
        kv("attributes", join(s.attribute_schema));

    if (!s.parameters.empty())
    {
        out << "\n[parameters]\n";
        for (const auto& [key, value] : s.parameters)
            kv(key, format_double(value));
    }

    for (const auto& p : s.parties)
    {
        out << "\n[party]\n";
        kv("id", p.id);
        kv("role", to_string(p.role));
        for (const auto& [key, value] : p.attributes)
            kv("attr." + key, value);
        kv("voluntary", flag(p.voluntary_exposure));
        kv("informed", flag(p.informed));
        kv("beneficiary", flag(p.is_beneficiary));
        kv("decision_maker", flag(p.is_decision_maker));
        if (!p.withheld.empty())
            kv("withheld", join(p.withheld));
    }

    for (const auto& a : s.actions)
    {
        out << "\n[action]\n";
        kv("id", a.id);
        if (!a.label.empty())
            kv("label", a.label);
        kv("hold_course", flag(a.is_hold_course));
        for (const auto& o : a.outcomes)
        {
            out << "\n[outcome]\n";
            kv("id", o.id);
            if (!o.description.empty())
                kv("description", o.description);
            if (o.consequence)
            {
                kv("fatalities", format_double(o.consequence->fatalities));
                for (const auto& [cls, count] : o.consequence->injuries)
                    kv("injury." + cls, format_double(count));
                kv("person_hours", format_double(o.consequence->person_hours));
            }
            else
                kv("magnitude", format_double(o.magnitude));
            if (o.unit)
                kv("unit", to_string(*o.unit));
            kv("probability", o.probability_expr.empty() ? format_double(o.probability.value()) : o.probability_expr);
            if (o.uncertainty)
                kv("uncertainty",
                   format_double(o.uncertainty->lo.value()) + ", " + format_double(o.uncertainty->hi.value()));
            if (o.affected_party)
                kv("party", *o.affected_party);
            if (o.exclusive_group)
                kv("group", *o.exclusive_group);
            kv("fatal", flag(o.fatal));
        }
    }

    out << "\n[policy]\n";
    kv("exclude", join(s.fairness.excluded_attributes));
    for (const auto& [key, text] : s.fairness.rationale)
        kv("rationale." + key, text);

    out << "\n[weighting]\n";
    kv("mode", to_string(s.weighting.mode));
    kv("gamma", format_double(s.weighting.gamma));

    out << "\n[schedule]\n";
    kv("vsl_usd", format_double(s.schedule.vsl_usd));
    kv("travel_time_usd_per_person_hour", format_double(s.schedule.travel_time_usd_per_person_hour));
    for (const auto& [cls, cost] : s.schedule.injury_cost_table)
        kv("injury." + cls, format_double(cost));

    for (const auto& rule : s.modifiers.categorical)
    {
        out << "\n[modifier]\n";
        kv("attribute", rule.attribute);
        kv("equals", rule.equals);
        kv("factor", format_double(rule.factor));
        kv("target", to_string(rule.target));
    }
    for (const auto& c : s.modifiers.curves)
    {
        out << "\n[curve]\n";
        kv("attribute", c.attribute);
        kv("x_lo", format_double(c.x_lo));
        kv("factor_lo", format_double(c.factor_lo));
        kv("x_hi", format_double(c.x_hi));
        kv("factor_hi", format_double(c.factor_hi));
        kv("target", to_string(c.target));
    }
    return out.str();
}

} // namespace avrisk::dsl
