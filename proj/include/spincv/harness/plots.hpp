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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spincv {

/// A run directory lacks the file a request depends on.
class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PlotKind { Decay, Trace, Taxonomy, Exchange };

std::string_view plot_name(PlotKind kind);
/// Throws ValidationError for an unknown name.
PlotKind plot_from_name(std::string_view name);
std::vector<PlotKind> all_plots();

/// CSV text for one plot:
///   decay    length,mean_survival,stderr,series   (from records.jsonl)
///   trace    lab_time,gate,F_median,F_low,F_high  (from fbt_trace.json)
///   taxonomy gate,category,pauli,h,s              (from gst_report.json)
///   exchange voltage,J                            (from config.json)
std::string plot_csv(const std::filesystem::path& run_dir, PlotKind kind);

/// Writes <run_dir>/<name>.csv and returns its path.
std::filesystem::path emit_plot_data(const std::filesystem::path& run_dir, PlotKind kind);

}  // namespace spincv
