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

#include <stdexcept>
#include <string>

namespace avrisk
{

/// Base class for every error raised by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A scenario reached a decider without any action alternatives.
class empty_action_set : public error
{
public:
    empty_action_set() : error("scenario has no actions") {}
};

class unknown_injury_class : public error
{
public:
    explicit unknown_injury_class(const std::string& injury_class)
        : error("injury class '" + injury_class + "' is not in the cost table"), injury_class_(injury_class)
    {
    }
    const std::string& injury_class() const noexcept { return injury_class_; }

private:
    std::string injury_class_;
};

/// A fairness policy names an attribute that the scenario schema does not declare.
class unknown_attribute : public error
{
public:
    explicit unknown_attribute(const std::string& key)
        : error("attribute '" + key + "' is not in the scenario attribute schema"), key_(key)
    {
    }
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class not_a_trolley_scenario : public error
{
public:
    using error::error;
};

class no_exposed_parties : public error
{
public:
    no_exposed_parties() : error("no party carries a positive risk share") {}
};

class unknown_action : public error
{
public:
    explicit unknown_action(const std::string& id) : error("no action with id '" + id + "'") {}
};

} // namespace avrisk
