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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spincv/common/errors.hpp"
#include "spincv/harness/experiment.hpp"
#include "spincv/harness/plots.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;
constexpr int kUnphysical = 4;

int run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& output) {
  spincv::ExperimentConfig config;
  try {
    config = spincv::load_experiment_config(config_path);
  } catch (const spincv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  if (seed) config.seed = *seed;
  if (!output.empty()) config.output = output;
  const auto summary = spincv::run_experiment(config);
  std::cout << spincv::format_report(summary.report);
  std::cout << "artifacts in " << summary.directory.string() << ":";
  for (const auto& a : summary.artifacts) std::cout << " " << a;
  std::cout << "\n";
  return summary.unphysical ? kUnphysical : kOk;
}

int report(const std::filesystem::path& dir) {
  const auto file = dir / spincv::artifact::kReport;
  std::ifstream in(file);
  if (!in) throw spincv::ArtifactError("missing artifact: expected " + file.string());
  const auto j = nlohmann::json::parse(in);
  std::cout << spincv::format_report(j);
  return j.value("flagged_unphysical", false) ? kUnphysical : kOk;
}

int emit(const std::filesystem::path& dir, const std::string& which) {
  if (which != "all") {
    std::cout << spincv::emit_plot_data(dir, spincv::plot_from_name(which)).string() << "\n";
    return kOk;
  }
  int status = kOk;
  for (const auto kind : spincv::all_plots()) {
    try {
      std::cout << spincv::emit_plot_data(dir, kind).string() << "\n";
    } catch (const spincv::ArtifactError& e) {
      std::cerr << spincv::plot_name(kind) << ": " << e.what() << "\n";
      status = kRuntimeError;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated spin-qubit benchmarking: IRB, fast Bayesian tomography and gate set tomography"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Simulate an experiment and write its run directory");
  std::string config_path, output;
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("-c,--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-s,--seed", seed, "Override the master seed");
  run_cmd->add_option("-o,--output", output, "Override the output directory");

  auto* report_cmd = app.add_subcommand("report", "Print the report of a finished run");
  std::string report_dir;
  report_cmd->add_option("run_dir", report_dir, "Run directory")->required();

  auto* emit_cmd = app.add_subcommand("emit", "Write plot-ready CSV files into a run directory");
  std::string emit_dir, which = "all";
  emit_cmd->add_option("run_dir", emit_dir, "Run directory")->required();
  emit_cmd->add_option("-w,--which", which, "decay, trace, taxonomy, exchange or all")
      ->check(CLI::IsMember({"decay", "trace", "taxonomy", "exchange", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return run(config_path, seed, output);
    if (*report_cmd) return report(report_dir);
    if (*emit_cmd) return emit(emit_dir, which);
  } catch (const spincv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
