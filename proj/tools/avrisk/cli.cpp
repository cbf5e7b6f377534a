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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "avrisk/audit.hpp"
#include "avrisk/baselines.hpp"
#include "avrisk/catalog.hpp"
#include "avrisk/dsl.hpp"
#include "avrisk/errors.hpp"
#include "avrisk/fairness.hpp"
#include "avrisk/simulate.hpp"

namespace avrisk::cli
{

namespace
{

using json = nlohmann::ordered_json;

std::string number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"\n") == std::string::npos)
        return text;
    std::string quoted = "\"";
    for (char c : text)
        quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
}

void csv_row(std::ostream& out, std::initializer_list<std::string> fields)
{
    bool first = true;
    for (const auto& f : fields)
    {
        out << (first ? "" : ",") << csv_field(f);
        first = false;
    }
    out << '\n';
}

json json_number(double value)
{
    // inf and nan have no JSON spelling
    return std::isfinite(value) ? json(value) : json(nullptr);
}

struct Loaded
{
    std::string display_name;
    std::string text;
};

std::optional<Loaded> load(const std::string& ref, std::ostream& err)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::is_regular_file(ref, ec))
    {
        std::ifstream in(ref, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        if (!in.good() && !in.eof())
        {
            err << "avrisk: cannot read " << ref << '\n';
            return std::nullopt;
        }
        return Loaded{ref, buf.str()};
    }
    if (const auto* entry = find_catalog_entry(ref))
        return Loaded{entry->name + ".scn", entry->source};
    err << "avrisk: '" << ref << "' is neither a readable file nor a catalog scenario\n";
    return std::nullopt;
}

void print_diagnostics(const std::vector<dsl::Diagnostic>& diags, const std::string& file, std::ostream& err)
{
    for (const auto& d : diags)
        err << dsl::format(d, file) << '\n';
}

void apply_overrides(Scenario& s, const Overrides& o)
{
    if (o.weighting)
        s.weighting.mode = *o.weighting;
    if (o.gamma)
        s.weighting.gamma = *o.gamma;
    if (o.exclude)
    {
        s.fairness.excluded_attributes = *o.exclude;
        for (auto it = s.fairness.rationale.begin(); it != s.fairness.rationale.end();)
            it = o.exclude->count(it->first) ? std::next(it) : s.fairness.rationale.erase(it);
    }
    if (o.selection)
        s.selection_mode = *o.selection;
    if (o.vsl_usd)
        s.schedule.vsl_usd = *o.vsl_usd;
    if (o.time_rate)
        s.schedule.travel_time_usd_per_person_hour = *o.time_rate;
    if (o.vsl_usd || o.time_rate)
        for (auto& a : s.actions)
            for (auto& out : a.outcomes)
                if (out.consequence)
                    out.magnitude = monetize(*out.consequence, s.schedule).value;
}

// ---- check -------------------------------------------------------------------

int check(const RunConfig& config, const Loaded& file, const dsl::ParseResult& parsed, std::ostream& out)
{
    const auto& diags = parsed.diagnostics;
    switch (config.format)
    {
    case Format::table:
        for (const auto& d : diags)
            out << dsl::format(d, file.display_name) << '\n';
        out << file.display_name << ": " << (parsed.ok() ? "ok" : "invalid") << ", " << diags.size()
            << (diags.size() == 1 ? " diagnostic" : " diagnostics") << '\n';
        break;
    case Format::csv:
        csv_row(out, {"severity", "code", "line", "column", "message"});
        for (const auto& d : diags)
            csv_row(out, {std::string(dsl::to_string(d.severity)), std::string(dsl::to_string(d.code)),
                          std::to_string(d.span.line), std::to_string(d.span.column), d.message});
        break;
    case Format::json:
    {
        json j;
        j["file"] = file.display_name;
        j["ok"] = parsed.ok();
        j["diagnostics"] = json::array();
        for (const auto& d : diags)
            j["diagnostics"].push_back({{"severity", dsl::to_string(d.severity)},
                                        {"code", dsl::to_string(d.code)},
                                        {"line", d.span.line},
                                        {"column", d.span.column},
                                        {"message", d.message}});
        out << j.dump(2) << '\n';
        break;
    }
    }
    return parsed.ok() ? exit_ok : exit_diagnostics;
}

// ---- evaluate ----------------------------------------------------------------

int evaluate(const RunConfig& config, const Scenario& scenario, std::ostream& out)
{
    const Scenario prepared = prepare(scenario);
    const auto result = select_action(prepared);

    switch (config.format)
    {
    case Format::table:
        out << "scenario: " << scenario.name << '\n';
        out << "unit: " << to_string(scenario.unit) << "   weighting: " << to_string(scenario.weighting.mode);
        if (scenario.weighting.mode == WeightingMode::exponential)
            out << " (gamma " << number(scenario.weighting.gamma) << ")";
        out << "   selection: " << to_string(result.mode) << "\n\n";
        out << decision_trace(result);
        break;
    case Format::csv:
        csv_row(out, {"kind", "action", "outcome", "description", "magnitude", "probability", "penalty", "penalty_lo",
                      "penalty_hi"});
        for (const auto& action : prepared.actions)
        {
            for (const auto& o : action.outcomes)
            {
                const auto interval = penalty_interval(o);
                csv_row(out, {"outcome", action.id, o.id, o.description, number(o.magnitude),
                              number(o.probability.value()), number(risk_penalty(o)), number(interval.lo),
                              number(interval.hi)});
            }
            const auto& score = result.score(action.id);
            csv_row(out, {"total", action.id, "", action.label, "", "", number(score.penalty),
                          number(score.penalty_interval.lo), number(score.penalty_interval.hi)});
        }
        csv_row(out, {"decision", result.chosen_action, "", result.tie_broken ? "tie policy" : "minimum", "", "",
                      number(result.score(result.chosen_action).penalty), "", ""});
        break;
    case Format::json:
    {
        json j;
        j["scenario"] = scenario.name;
        j["unit"] = to_string(scenario.unit);
        j["weighting"] = {{"mode", to_string(scenario.weighting.mode)}, {"gamma", scenario.weighting.gamma}};
        j["selection_mode"] = to_string(result.mode);
        j["chosen_action"] = result.chosen_action;
        j["tie_broken"] = result.tie_broken;
        j["actions"] = json::array();
        for (const auto& action : prepared.actions)
        {
            const auto& score = result.score(action.id);
            json a;
            a["id"] = action.id;
            a["label"] = action.label;
            a["hold_course"] = action.is_hold_course;
            a["penalty"] = score.penalty;
            a["penalty_interval"] = {score.penalty_interval.lo, score.penalty_interval.hi};
            a["outcomes"] = json::array();
            for (const auto& o : action.outcomes)
            {
                const auto interval = penalty_interval(o);
                a["outcomes"].push_back({{"id", o.id},
                                         {"description", o.description},
                                         {"magnitude", o.magnitude},
                                         {"probability", o.probability.value()},
                                         {"penalty", risk_penalty(o)},
                                         {"penalty_interval", {interval.lo, interval.hi}},
                                         {"adjustments", o.adjustments}});
            }
            j["actions"].push_back(std::move(a));
        }
        j["rationale"] = result.trace.rationale;
        out << j.dump(2) << '\n';
        break;
    }
    }
    return exit_ok;
}

// ---- simulate ----------------------------------------------------------------

int simulate_command(const RunConfig& config, const Scenario& scenario, std::ostream& out)
{
    const auto report =
        sim::consistency_check(scenario, config.trials, config.seed, {.workers = config.workers, .chunk_size = 4096});

    switch (config.format)
    {
    case Format::table:
    {
        out << "scenario: " << scenario.name << "   trials: " << config.trials << "   seed: " << config.seed << "\n\n";
        char line[256];
        std::snprintf(line, sizeof line, "%-24s %18s %18s %18s %18s  %s\n", "action", "analytic", "mean", "stderr",
                      "z", "result");
        out << line;
        for (const auto& row : report.rows)
        {
            std::snprintf(line, sizeof line, "%-24s %18s %18s %18s %18s  %s\n", row.action_id.c_str(),
                          number(row.analytic).c_str(), number(row.empirical.mean).c_str(),
                          number(row.empirical.std_error).c_str(), number(row.z_score).c_str(),
                          row.pass ? "pass" : "FAIL");
            out << line;
        }
        out << "\nconsistency: " << (report.pass ? "pass" : "FAIL") << " (|z| <= 4)\n";
        break;
    }
    case Format::csv:
        csv_row(out, {"action", "analytic", "mean", "std_error", "ci95_lo", "ci95_hi", "z_score", "pass"});
        for (const auto& row : report.rows)
            csv_row(out, {row.action_id, number(row.analytic), number(row.empirical.mean),
                          number(row.empirical.std_error), number(row.empirical.ci95.lo),
                          number(row.empirical.ci95.hi), number(row.z_score), row.pass ? "true" : "false"});
        break;
    case Format::json:
    {
        json j;
        j["scenario"] = scenario.name;
        j["trials"] = config.trials;
        j["seed"] = config.seed;
        j["pass"] = report.pass;
        j["actions"] = json::array();
        for (const auto& row : report.rows)
            j["actions"].push_back({{"id", row.action_id},
                                    {"analytic", row.analytic},
                                    {"mean", row.empirical.mean},
                                    {"std_error", row.empirical.std_error},
                                    {"ci95", {row.empirical.ci95.lo, row.empirical.ci95.hi}},
                                    {"z_score", json_number(row.z_score)},
                                    {"pass", row.pass}});
        out << j.dump(2) << '\n';
        break;
    }
    }
    return exit_ok;
}

// ---- compare -----------------------------------------------------------------

int compare_command(const RunConfig& config, const Scenario& scenario, std::ostream& out)
{
    const auto c = baselines::compare(scenario);
    switch (config.format)
    {
    case Format::table:
    {
        out << "scenario: " << scenario.name << "\n\n";
        char line[256];
        std::snprintf(line, sizeof line, "%-16s %-24s %16s %16s\n", "decider", "action", "expected", "gap");
        out << line;
        for (const auto& row : c.rows)
        {
            std::snprintf(line, sizeof line, "%-16s %-24s %16s %16s\n", row.decider.c_str(), row.action_id.c_str(),
                          number(row.expected_penalty).c_str(), number(row.gap).c_str());
            out << line;
        }
        out << "\ndivergent: " << (c.divergent ? "yes" : "no") << "   max gap: " << number(c.max_gap) << '\n';
        break;
    }
    case Format::csv:
        csv_row(out, {"decider", "action", "expected_penalty", "gap"});
        for (const auto& row : c.rows)
            csv_row(out, {row.decider, row.action_id, number(row.expected_penalty), number(row.gap)});
        break;
    case Format::json:
    {
        json j;
        j["scenario"] = scenario.name;
        j["divergent"] = c.divergent;
        j["max_gap"] = c.max_gap;
        j["deciders"] = json::array();
        for (const auto& row : c.rows)
            j["deciders"].push_back({{"decider", row.decider},
                                     {"action", row.action_id},
                                     {"expected_penalty", row.expected_penalty},
                                     {"gap", row.gap}});
        out << j.dump(2) << '\n';
        break;
    }
    }
    return exit_ok;
}

// ---- audit -------------------------------------------------------------------

int audit_command(const RunConfig& config, const Scenario& scenario, std::ostream& out, std::ostream& err)
{
    const auto decision = decide(scenario);
    const auto report = audit::hansson_report(scenario, decision);

    std::vector<audit::RiskDistribution> distributions;
    for (const auto& a : scenario.actions)
        distributions.push_back(audit::risk_distribution(scenario, a.id));
    auto index_of = [](const audit::RiskDistribution& d) -> std::optional<double> {
        try
        {
            return audit::fairness_index(d);
        }
        catch (const no_exposed_parties&)
        {
            return std::nullopt;
        }
    };
    for (const auto& w : distributions.front().warnings)
        err << "warning: " << w << '\n';

    switch (config.format)
    {
    case Format::table:
        out << "scenario: " << scenario.name << "   chosen action: " << decision.chosen_action << "\n\n";
        for (const auto& d : distributions)
        {
            const auto index = index_of(d);
            out << "action " << d.action_id << "   total " << number(d.total) << "   fairness index "
                << (index ? number(*index) : std::string("n/a")) << '\n';
            for (const auto& [party, share] : d.shares)
                out << "  " << party << ": " << number(share) << '\n';
        }
        out << '\n';
        for (const auto& e : report.entries)
        {
            out << e.number << ". " << e.question << '\n';
            for (const auto& [k, v] : e.inputs)
                out << "     " << k << ": " << v << '\n';
            out << "   -> " << e.answer << "\n\n";
        }
        break;
    case Format::csv:
        csv_row(out, {"section", "action", "key", "value"});
        for (const auto& d : distributions)
        {
            for (const auto& [party, share] : d.shares)
                csv_row(out, {"share", d.action_id, party, number(share)});
            csv_row(out, {"total", d.action_id, "", number(d.total)});
            const auto index = index_of(d);
            csv_row(out, {"fairness_index", d.action_id, "", index ? number(*index) : ""});
        }
        for (const auto& a : scenario.actions)
            if (a.id != decision.chosen_action)
                for (const auto& [party, delta] : audit::risk_transfer(scenario, decision.chosen_action, a.id))
                    csv_row(out, {"transfer", decision.chosen_action + "->" + a.id, party, number(delta)});
        for (const auto& e : report.entries)
            csv_row(out, {"hansson", decision.chosen_action, std::to_string(e.number), e.answer});
        break;
    case Format::json:
    {
        json j;
        j["scenario"] = scenario.name;
        j["chosen_action"] = decision.chosen_action;
        j["distributions"] = json::array();
        for (const auto& d : distributions)
        {
            const auto index = index_of(d);
            j["distributions"].push_back({{"action", d.action_id},
                                          {"shares", d.shares},
                                          {"total", d.total},
                                          {"fairness_index", index ? json(*index) : json(nullptr)},
                                          {"warnings", d.warnings}});
        }
        j["transfers"] = json::array();
        for (const auto& a : scenario.actions)
            if (a.id != decision.chosen_action)
                j["transfers"].push_back({{"from", decision.chosen_action},
                                          {"to", a.id},
                                          {"deltas", audit::risk_transfer(scenario, decision.chosen_action, a.id)}});
        j["hansson"] = json::array();
        for (const auto& e : report.entries)
        {
            json inputs = json::array();
            for (const auto& [k, v] : e.inputs)
                inputs.push_back({{"name", k}, {"value", v}});
            j["hansson"].push_back(
                {{"number", e.number}, {"question", e.question}, {"inputs", inputs}, {"answer", e.answer}});
        }
        out << j.dump(2) << '\n';
        break;
    }
    }
    return exit_ok;
}

} // namespace

std::uint64_t default_seed()
{
    if (const char* env = std::getenv("AVRISK_SEED"))
    {
        try
        {
            std::size_t used = 0;
            const auto value = std::stoull(env, &used);
            if (used == std::string_view(env).size())
                return value;
        }
        catch (const std::exception&)
        {
        }
    }
    return 1;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    try
    {
        const auto file = load(config.scenario, err);
        if (!file)
            return exit_error;

        const auto parsed = dsl::parse(file->text);
        if (config.command == Command::check)
            return check(config, *file, parsed, out);

        if (!parsed.ok())
        {
            print_diagnostics(parsed.diagnostics, file->display_name, err);
            return exit_diagnostics;
        }

        Scenario scenario = *parsed.scenario;
        apply_overrides(scenario, config.overrides);
        const auto diags = dsl::validate(scenario, &parsed.source_map);
        if (dsl::has_errors(diags))
        {
            print_diagnostics(diags, file->display_name, err);
            return exit_diagnostics;
        }

        switch (config.command)
        {
        case Command::evaluate: return evaluate(config, scenario, out);
        case Command::simulate:
            if (config.trials == 0)
            {
                err << "avrisk: --trials must be at least 1\n";
                return exit_error;
            }
            return simulate_command(config, scenario, out);
        case Command::compare: return compare_command(config, scenario, out);
        case Command::audit: return audit_command(config, scenario, out, err);
        case Command::check: break;
        }
        return exit_ok;
    }
    catch (const std::exception& e)
    {
        err << "avrisk: internal error: " << e.what() << '\n';
        return exit_error;
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Risk-based decision making for automated-vehicle scenarios", "avrisk"};
    app.require_subcommand(1);

    RunConfig config;
    config.seed = default_seed();

    const std::map<std::string, Format> formats{{"table", Format::table}, {"csv", Format::csv}, {"json", Format::json}};
    const std::map<std::string, WeightingMode> weightings{{"linear", WeightingMode::linear},
                                                          {"exponential", WeightingMode::exponential}};
    const std::map<std::string, SelectionMode> selections{{"expected", SelectionMode::expected},
                                                          {"robust", SelectionMode::robust_worst_case},
                                                          {"robust_worst_case", SelectionMode::robust_worst_case}};

    std::string format = "table", weighting, selection;
    double gamma = 0.0, vsl = 0.0, time_rate = 0.0;
    std::vector<std::string> exclude;

    struct Sub
    {
        Command command;
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {Command::check, "check", "Parse and validate a scenario, printing diagnostics"},
        {Command::evaluate, "evaluate", "Score every action and pick one"},
        {Command::simulate, "simulate", "Monte Carlo check of the analytic penalties"},
        {Command::compare, "compare", "Run the baseline deciders next to the risk decider"},
        {Command::audit, "audit", "Risk distribution, transfers and the seven ethical-risk questions"},
    };

    std::map<std::string, CLI::Option*> flags;
    for (const auto& sub : subs)
    {
        auto* cmd = app.add_subcommand(sub.name, sub.help);
        cmd->add_option("scenario", config.scenario, "Scenario file or catalog name")->required();
        cmd->add_option("--format", format, "Output format: table, csv or json")
            ->check(CLI::IsMember(formats, CLI::ignore_case));
        if (sub.command == Command::check)
            continue;
        const std::string n = sub.name;
        flags[n + ".weighting"] = cmd->add_option("--weighting", weighting, "Certainty weighting: linear or exponential")
                                      ->check(CLI::IsMember(weightings, CLI::ignore_case));
        flags[n + ".gamma"] = cmd->add_option("--gamma", gamma, "Exponential weighting rate")->check(CLI::NonNegativeNumber);
        flags[n + ".exclude"] =
            cmd->add_option("--exclude", exclude, "Comma-separated attributes withheld from decisions")->delimiter(',');
        flags[n + ".no-exclude"] = cmd->add_flag("--no-exclude", "Withhold no attributes");
        flags[n + ".exclude"]->excludes(flags[n + ".no-exclude"]);
        flags[n + ".selection"] = cmd->add_option("--selection", selection, "Selection mode: expected or robust")
                                      ->check(CLI::IsMember(selections, CLI::ignore_case));
        flags[n + ".vsl"] = cmd->add_option("--vsl", vsl, "Value of a statistical life in usd")->check(CLI::NonNegativeNumber);
        flags[n + ".time-rate"] =
            cmd->add_option("--time-rate", time_rate, "Travel time value in usd per person-hour")->check(CLI::NonNegativeNumber);
        if (sub.command == Command::simulate)
        {
            cmd->add_option("--trials", config.trials, "Episodes per action")->check(CLI::PositiveNumber);
            cmd->add_option("--seed", config.seed, "Random seed (default: $AVRISK_SEED or 1)");
            cmd->add_option("--workers", config.workers, "Worker threads; results do not depend on it")
                ->check(CLI::Range(1u, 256u));
        }
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_error;
    }

    for (const auto& sub : subs)
    {
        if (!app.got_subcommand(sub.name))
            continue;
        config.command = sub.command;
        config.format = formats.at(CLI::detail::to_lower(format));
        const std::string n = sub.name;
        auto given = [&](const char* flag) {
            auto it = flags.find(n + "." + flag);
            return it != flags.end() && it->second->count() > 0;
        };
        if (given("weighting"))
            config.overrides.weighting = weightings.at(CLI::detail::to_lower(weighting));
        if (given("gamma"))
            config.overrides.gamma = gamma;
        if (given("exclude"))
            config.overrides.exclude = std::set<std::string>(exclude.begin(), exclude.end());
        if (given("no-exclude"))
            config.overrides.exclude = std::set<std::string>{};
        if (given("selection"))
            config.overrides.selection = selections.at(CLI::detail::to_lower(selection));
        if (given("vsl"))
            config.overrides.vsl_usd = vsl;
        if (given("time-rate"))
            config.overrides.time_rate = time_rate;
    }
    return run(config, out, err);
}

} // namespace avrisk::cli
