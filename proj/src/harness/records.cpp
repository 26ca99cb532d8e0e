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

#include "spincv/harness/records.hpp"

#include <fstream>
#include <sstream>

#include "spincv/common/errors.hpp"

namespace spincv {
namespace {

template <class T>
T field(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("record: missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("record: field '") + key + "' has the wrong type");
  }
}

}  // namespace

nlohmann::ordered_json record_to_json(const MeasurementRecord& r) {
  nlohmann::ordered_json j;
  auto& tokens = j["circuit"] = nlohmann::ordered_json::array();
  for (const auto& g : r.circuit) tokens.push_back(to_token(g));
  j["shots"] = r.shots;
  j["even_count"] = r.even_count;
  j["odd_count"] = r.odd_count;
  j["lab_time"] = r.lab_time;
  j["context_id"] = r.context_id;
  j["series"] = r.series;
  j["length"] = r.length;
  j["expected_odd"] = r.expected_odd;
  return j;
}

MeasurementRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("record: expected an object");
  MeasurementRecord r;
  for (const auto& t : field<std::vector<std::string>>(j, "circuit")) r.circuit.push_back(from_token(t));
  r.shots = field<int>(j, "shots");
  r.even_count = field<int>(j, "even_count");
  r.odd_count = field<int>(j, "odd_count");
  r.lab_time = field<double>(j, "lab_time");
  r.context_id = field<long>(j, "context_id");
  r.series = field<std::string>(j, "series");
  r.length = field<int>(j, "length");
  r.expected_odd = field<bool>(j, "expected_odd");
  if (r.even_count < 0 || r.odd_count < 0 || r.even_count + r.odd_count != r.shots)
    throw ValidationError("record: even_count + odd_count must equal shots");
  return r;
}

std::string record_line(const MeasurementRecord& record) { return record_to_json(record).dump(); }

std::string records_to_jsonl(std::span<const MeasurementRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += record_line(r);
    out += '\n';
  }
  return out;
}

std::vector<MeasurementRecord> parse_records(std::istream& in) {
  std::vector<MeasurementRecord> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("records line " + std::to_string(n) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ValidationError("records line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MeasurementRecord> parse_records(const std::string& text) {
  std::istringstream in(text);
  return parse_records(in);
}

void write_records(const std::filesystem::path& file, std::span<const MeasurementRecord> records) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << records_to_jsonl(records);
}

std::vector<MeasurementRecord> read_records(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return parse_records(in);
}

}  // namespace spincv
