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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spincv/device/readout.hpp"

namespace spincv {

/// Fixed field order: circuit, shots, even_count, odd_count, lab_time,
/// context_id, series, length, expected_odd. The circuit is a token array.
nlohmann::ordered_json record_to_json(const MeasurementRecord& record);

/// Throws ValidationError on missing or mistyped fields and on count mismatch.
MeasurementRecord record_from_json(const nlohmann::json& j);

/// One compact JSON object per line.
std::string record_line(const MeasurementRecord& record);
std::string records_to_jsonl(std::span<const MeasurementRecord> records);

/// Blank lines are skipped; errors name the 1-based line.
std::vector<MeasurementRecord> parse_records(std::istream& in);
std::vector<MeasurementRecord> parse_records(const std::string& text);

void write_records(const std::filesystem::path& file, std::span<const MeasurementRecord> records);
std::vector<MeasurementRecord> read_records(const std::filesystem::path& file);

}  // namespace spincv
