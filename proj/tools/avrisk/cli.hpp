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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "avrisk/scenario.hpp"

namespace avrisk::cli
{

enum class Command
{
    check,
    evaluate,
    simulate,
    compare,
    audit,
};

enum class Format
{
    table,
    csv,
    json,
};

/// Flag values that replace the matching scenario file keys.
struct Overrides
{
    std::optional<WeightingMode> weighting;
    std::optional<double> gamma;
    std::optional<std::set<std::string>> exclude;
    std::optional<SelectionMode> selection;
    std::optional<double> vsl_usd;
    std::optional<double> time_rate;
};

struct RunConfig
{
    Command command = Command::evaluate;
    std::string scenario; // file path or catalog name
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 1;
    Format format = Format::table;
    unsigned workers = 1; // never part of the output
    Overrides overrides;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_diagnostics = 1;
inline constexpr int exit_error = 2;

/// Seed used when --seed is absent: AVRISK_SEED if set to an integer, else 1.
std::uint64_t default_seed();

/// Executes one command. Reports go to out, diagnostics and errors to err.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments and runs. Usage errors exit with 2.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace avrisk::cli
