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

#include "spincv/harness/plots.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spincv/common/errors.hpp"
#include "spincv/device/config.hpp"
#include "spincv/harness/experiment.hpp"
#include "spincv/harness/records.hpp"
#include "spincv/irb/rb.hpp"

namespace spincv {
namespace {

constexpr std::pair<PlotKind, std::string_view> kPlots[] = {
    {PlotKind::Decay, "decay"},
    {PlotKind::Trace, "trace"},
    {PlotKind::Taxonomy, "taxonomy"},
    {PlotKind::Exchange, "exchange"},
};

std::filesystem::path require(const std::filesystem::path& dir, const char* name) {
  const auto p = dir / name;
  if (!std::filesystem::is_regular_file(p)) throw ArtifactError("missing artifact: expected " + p.string());
  return p;
}

nlohmann::json load_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError("malformed artifact " + file.string() + ": " + e.what());
  }
}

std::string decay(const std::filesystem::path& dir) {
  const auto records = read_records(require(dir, artifact::kRecords));
  std::vector<std::string> series;
  for (const auto& r : records)
    if (std::find(series.begin(), series.end(), r.series) == series.end()) series.push_back(r.series);
  std::ostringstream os;
  os.precision(10);
  os << "length,mean_survival,stderr,series\n";
  for (const auto& s : series) {
    const RBDataset d = dataset_from_records(records, s);
    for (std::size_t i = 0; i < d.lengths.size(); ++i)
      os << d.lengths[i] << ',' << d.mean_survival(i) << ',' << d.standard_error(i) << ',' << s << '\n';
  }
  return os.str();
}

std::string trace(const std::filesystem::path& dir) {
  const auto j = load_json(require(dir, artifact::kTrace));
  std::ostringstream os;
  os.precision(10);
  os << "lab_time,gate,F_median,F_low,F_high\n";
  for (const auto& w : j)
    for (const auto& g : w.at("gates"))
      os << w.at("lab_time").get<double>() << ',' << g.at("gate").get<std::string>() << ','
         << g.at("f_median").get<double>() << ',' << g.at("f_low").get<double>() << ','
         << g.at("f_high").get<double>() << '\n';
  return os.str();
}

std::string taxonomy(const std::filesystem::path& dir) {
  const auto j = load_json(require(dir, artifact::kGst));
  std::ostringstream os;
  os.precision(10);
  os << "gate,category,pauli,h,s\n";
  for (const auto& t : j.at("taxonomy")) {
    const bool h = t.at("type").get<std::string>() == "h";
    const double v = t.at("value").get<double>();
    os << t.at("gate").get<std::string>() << ',' << t.at("category").get<std::string>() << ','
       << t.at("pauli").get<std::string>() << ',' << (h ? v : 0.0) << ',' << (h ? 0.0 : v) << '\n';
  }
  return os.str();
}

std::string exchange(const std::filesystem::path& dir) {
  const auto j = load_json(require(dir, artifact::kConfig));
  DeviceParameters p;
  try {
    p = device_from_json(j.at("device"));
  } catch (const std::exception& e) {
    throw ArtifactError("malformed device in " + (dir / artifact::kConfig).string() + ": " + e.what());
  }
  constexpr int kPoints = 41;
  std::ostringstream os;
  os.precision(12);
  os << "voltage,J\n";
  for (int i = 0; i < kPoints; ++i) {
    const double v = p.v_range * i / (kPoints - 1);
    os << v << ',' << exchange_from_voltage(p, v) << '\n';
  }
  return os.str();
}

}  // namespace

std::string_view plot_name(PlotKind kind) {
  for (const auto& [k, n] : kPlots)
    if (k == kind) return n;
  return "?";
}

PlotKind plot_from_name(std::string_view name) {
  for (const auto& [k, n] : kPlots)
    if (n == name) return k;
  throw ValidationError("unknown plot '" + std::string(name) + "' (expected decay, trace, taxonomy or exchange)");
}

std::vector<PlotKind> all_plots() { return {PlotKind::Decay, PlotKind::Trace, PlotKind::Taxonomy, PlotKind::Exchange}; }

std::string plot_csv(const std::filesystem::path& run_dir, PlotKind kind) {
  switch (kind) {
    case PlotKind::Decay: return decay(run_dir);
    case PlotKind::Trace: return trace(run_dir);
    case PlotKind::Taxonomy: return taxonomy(run_dir);
    case PlotKind::Exchange: return exchange(run_dir);
  }
  throw ValidationError("unknown plot kind");
}

std::filesystem::path emit_plot_data(const std::filesystem::path& run_dir, PlotKind kind) {
  const std::string csv = plot_csv(run_dir, kind);
  const auto file = run_dir / (std::string(plot_name(kind)) + ".csv");
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << csv;
  return file;
}

}  // namespace spincv
