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

#include <string>
#include <string_view>
#include <vector>

#include "avrisk/scenario.hpp"

namespace avrisk
{

struct CatalogEntry
{
    std::string name;
    std::string source; // scenario file text as shipped
    Scenario scenario;
};

/// The five canonical scenarios: tunnel_child, lane_change_truck, lane_positioning,
/// motorcyclists_helmet, pedestrian_blind_spot.
const std::vector<CatalogEntry>& catalog();

/// Companion scenarios shipped alongside the catalog: the no-turn variant of
/// lane_change_truck and the deontological gamble.
const std::vector<CatalogEntry>& catalog_extras();

/// Looks a name up in catalog() and then catalog_extras().
const CatalogEntry* find_catalog_entry(std::string_view name);

} // namespace avrisk
