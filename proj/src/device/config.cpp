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

#include "spincv/device/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "spincv/common/errors.hpp"

namespace spincv {
namespace {

using Field = std::function<double&(DeviceParameters&)>;

const std::vector<std::pair<std::string, Field>>& top_fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"f1", [](DeviceParameters& p) -> double& { return p.f1; }},
      {"f2", [](DeviceParameters& p) -> double& { return p.f2; }},
      {"rabi1", [](DeviceParameters& p) -> double& { return p.rabi1; }},
      {"rabi2", [](DeviceParameters& p) -> double& { return p.rabi2; }},
      {"j_off", [](DeviceParameters& p) -> double& { return p.j_off; }},
      {"j_slope", [](DeviceParameters& p) -> double& { return p.j_slope; }},
      {"v_range", [](DeviceParameters& p) -> double& { return p.v_range; }},
      {"v_on", [](DeviceParameters& p) -> double& { return p.v_on; }},
      {"stark_coeff", [](DeviceParameters& p) -> double& { return p.stark_coeff; }},
      {"t2star1", [](DeviceParameters& p) -> double& { return p.t2star1; }},
      {"t2star2", [](DeviceParameters& p) -> double& { return p.t2star2; }},
      {"t2hahn1", [](DeviceParameters& p) -> double& { return p.t2hahn1; }},
      {"t2hahn2", [](DeviceParameters& p) -> double& { return p.t2hahn2; }},
      {"j_sigma", [](DeviceParameters& p) -> double& { return p.j_sigma; }},
      {"readout_time", [](DeviceParameters& p) -> double& { return p.readout_time; }},
  };
  return f;
}

const std::vector<std::pair<std::string, Field>>& drift_fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"heating_amplitude1", [](DeviceParameters& p) -> double& { return p.drift.heating_amplitude1; }},
      {"heating_amplitude2", [](DeviceParameters& p) -> double& { return p.drift.heating_amplitude2; }},
      {"heating_tau", [](DeviceParameters& p) -> double& { return p.drift.heating_tau; }},
      {"cooldown_tau", [](DeviceParameters& p) -> double& { return p.drift.cooldown_tau; }},
      {"walk_sigma", [](DeviceParameters& p) -> double& { return p.drift.walk_sigma; }},
      {"exchange_drift_rate", [](DeviceParameters& p) -> double& { return p.drift.exchange_drift_rate; }},
  };
  return f;
}

const std::vector<std::pair<std::string, Field>>& spam_fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"init_error", [](DeviceParameters& p) -> double& { return p.spam.init_error; }},
      {"readout_flip_even", [](DeviceParameters& p) -> double& { return p.spam.readout_flip_even; }},
      {"readout_flip_odd", [](DeviceParameters& p) -> double& { return p.spam.readout_flip_odd; }},
  };
  return f;
}

void read_fields(const nlohmann::json& j, const std::vector<std::pair<std::string, Field>>& fields,
                 DeviceParameters& p, bool required, const std::string& path, std::vector<std::string>& errors) {
  for (const auto& [key, field] : fields) {
    if (!j.contains(key)) {
      if (required) errors.push_back(path + "." + key + ": missing (no preset given)");
      continue;
    }
    const auto& v = j.at(key);
    if (!v.is_number()) {
      errors.push_back(path + "." + key + ": expected a number");
      continue;
    }
    field(p) = v.get<double>();
  }
}

void reject_unknown(const nlohmann::json& j, const std::vector<std::string>& allowed, const std::string& path,
                    std::vector<std::string>& errors) {
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      errors.push_back(path + "." + item.key() + ": unknown key");
  }
}

std::vector<std::string> keys_of(const std::vector<std::pair<std::string, Field>>& fields) {
  std::vector<std::string> k;
  for (const auto& f : fields) k.push_back(f.first);
  return k;
}

}  // namespace

DeviceParameters device_from_json(const nlohmann::json& j, std::vector<std::string>& errors, const std::string& path) {
  DeviceParameters p;
  if (j.is_string()) {
    try {
      return device_preset(j.get<std::string>());
    } catch (const ValidationError& e) {
      errors.push_back(path + ": " + e.what());
      return p;
    }
  }
  if (!j.is_object()) {
    errors.push_back(path + ": expected a preset name or an object");
    return p;
  }
  auto allowed = keys_of(top_fields());
  allowed.insert(allowed.end(), {"preset", "name", "drift", "spam"});
  reject_unknown(j, allowed, path, errors);

  bool has_preset = false;
  if (j.contains("preset")) {
    if (!j.at("preset").is_string()) {
      errors.push_back(path + ".preset: expected a string");
    } else {
      try {
        p = device_preset(j.at("preset").get<std::string>());
        has_preset = true;
      } catch (const ValidationError& e) {
        errors.push_back(path + ".preset: " + e.what());
      }
    }
  }
  if (j.contains("name")) {
    if (j.at("name").is_string())
      p.name = j.at("name").get<std::string>();
    else
      errors.push_back(path + ".name: expected a string");
  }
  const bool required = !has_preset && !j.contains("preset");
  read_fields(j, top_fields(), p, required, path, errors);
  for (const auto& [section, fields] : {std::pair{std::string("drift"), &drift_fields()},
                                        std::pair{std::string("spam"), &spam_fields()}}) {
    if (!j.contains(section)) {
      if (required) errors.push_back(path + "." + section + ": missing (no preset given)");
      continue;
    }
    const auto& sub = j.at(section);
    if (!sub.is_object()) {
      errors.push_back(path + "." + section + ": expected an object");
      continue;
    }
    reject_unknown(sub, keys_of(*fields), path + "." + section, errors);
    read_fields(sub, *fields, p, required, path + "." + section, errors);
  }
  for (const auto& e : p.validation_errors()) errors.push_back(path + ": " + e);
  return p;
}

DeviceParameters device_from_json(const nlohmann::json& j) {
  std::vector<std::string> errors;
  DeviceParameters p = device_from_json(j, errors);
  if (!errors.empty()) {
    std::string msg = "device configuration has " + std::to_string(errors.size()) + " error(s):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return p;
}

DeviceParameters load_device_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open device configuration '" + file.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("device configuration '" + file.string() + "' is not valid JSON: " + e.what());
  }
  return device_from_json(j);
}

nlohmann::ordered_json device_to_json(const DeviceParameters& params) {
  DeviceParameters p = params;
  nlohmann::ordered_json j;
  j["name"] = p.name;
  for (const auto& [key, field] : top_fields()) j[key] = field(p);
  for (const auto& [key, field] : drift_fields()) j["drift"][key] = field(p);
  for (const auto& [key, field] : spam_fields()) j["spam"][key] = field(p);
  return j;
}

}  // namespace spincv
