// Copyright 2026 spincv contributors
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
#include <string>
#include <vector>

#include <json.hpp>

#include "spincv/device/parameters.hpp"

namespace spincv {

/// Device configuration tree. Either {"preset": "<id>", <overrides>} or a full
/// parameter set. Units: frequencies in Hz, times in s, voltages in V,
/// stark_coeff in Hz/V, walk_sigma in Hz/sqrt(s), exchange_drift_rate in 1/s.
/// Unknown keys, wrong types and (without a preset) missing keys are all
/// reported; `errors` receives one message per problem prefixed by `path`.
DeviceParameters device_from_json(const nlohmann::json& j, std::vector<std::string>& errors,
                                  const std::string& path = "device");

/// Throws ConfigError listing every schema and invariant violation.
DeviceParameters device_from_json(const nlohmann::json& j);
DeviceParameters load_device_config(const std::filesystem::path& file);

nlohmann::ordered_json device_to_json(const DeviceParameters& params);

}  // namespace spincv
