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

#include "avrisk/catalog.hpp"

#include <stdexcept>
#include <utility>

#include "avrisk/dsl.hpp"

namespace avrisk
{

namespace detail
{
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_catalog();
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_extras();
} // namespace detail

namespace
{

// Canonical order of the five catalog scenarios.
constexpr std::string_view catalog_order[] = {"tunnel_child", "lane_change_truck", "lane_positioning",
                                              "motorcyclists_helmet", "pedestrian_blind_spot"};

CatalogEntry load(std::string_view name, std::string_view text)
{
    auto parsed = dsl::parse(text);
    if (!parsed.ok())
    {
        std::string message = "shipped scenario '" + std::string(name) + "' does not parse:";
        for (const auto& d : parsed.diagnostics)
            message += "\n  " + dsl::format(d);
        throw std::logic_error(message);
    }
    return {std::string(name), std::string(text), std::move(*parsed.scenario)};
}

} // namespace

const std::vector<CatalogEntry>& catalog()
{
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> out;
        for (auto name : catalog_order)
            for (const auto& [file, text] : detail::embedded_catalog())
                if (file == name)
                    out.push_back(load(name, text));
        if (out.size() != std::size(catalog_order))
            throw std::logic_error("embedded catalog is incomplete");
        return out;
    }();
    return entries;
}

const std::vector<CatalogEntry>& catalog_extras()
{
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> out;
        for (const auto& [file, text] : detail::embedded_extras())
            out.push_back(load(file, text));
        return out;
    }();
    return entries;
}

const CatalogEntry* find_catalog_entry(std::string_view name)
{
    for (const auto* list : {&catalog(), &catalog_extras()})
        for (const auto& entry : *list)
            if (entry.name == name)
                return &entry;
    return nullptr;
}

} // namespace avrisk
