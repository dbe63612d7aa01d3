// Copyright 2026 The acclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "acclab/scenario.hpp"
#include "acclab/simulator.hpp"

namespace acclab {

using Json = nlohmann::ordered_json;

/// Everything a run needs: module parameters plus scenario definitions
/// that extend the built-in catalogue.
struct AppConfig {
  SimConfig sim;
  std::map<std::string, Scenario> scenarios;
};

/// Full document with every key at its default value.
[[nodiscard]] Json default_config_json();

[[nodiscard]] Json to_json(const SimConfig& cfg);
[[nodiscard]] Json to_json(const Scenario& s);
[[nodiscard]] Json to_json(const AppConfig& cfg);

/// Reads a document layered over the defaults. Unknown keys, wrong types and
/// invalid values raise ConfigError.
[[nodiscard]] AppConfig config_from_json(const Json& doc);
/// Scenario fields layered over `base`.
[[nodiscard]] Scenario scenario_from_json(const Json& doc, const Scenario& base);

/// Parses the file; throws ConfigError on I/O or syntax errors.
[[nodiscard]] Json read_config_file(const std::filesystem::path& path);

/// Applies `dotted.path=value` to the document. The value is read as JSON
/// when it parses, otherwise as a string. The path must already exist,
/// except below "scenarios".
void apply_override(Json& doc, std::string_view assignment);

/// Loads (optional) file, applies overrides, validates.
[[nodiscard]] AppConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);

/// Catalogue lookup that prefers scenarios defined in the config.
[[nodiscard]] Scenario resolve_scenario(const AppConfig& cfg, std::string_view name);

}  // namespace acclab
