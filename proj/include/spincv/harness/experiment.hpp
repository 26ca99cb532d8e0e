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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spincv/device/feedback.hpp"
#include "spincv/device/parameters.hpp"
#include "spincv/gst/design.hpp"
#include "spincv/gst/estimate.hpp"

namespace spincv {

enum class ExperimentKind { Irb, FbtOnIrb, Gst, DriftDemo, FeedbackDemo };

std::string_view kind_name(ExperimentKind kind);
/// Throws ConfigError for an unknown name.
ExperimentKind kind_from_name(std::string_view name);

struct IrbSettings {
  std::vector<int> lengths{1, 2, 4, 8, 16, 32, 64};
  int randomizations = 200;
  int shots = 100;
  Entangler entangler = Entangler::DCZ;  // compiles the Cliffords and is the interleaved target
  int bootstrap_samples = 200;
  bool shuffle = false;  // execute reference and interleaved circuits in one random order
  bool fix_asymptote = true;  // fit A p^m + 1/2; the random final Pauli balances both parities
};

struct FbtSettings {
  double prior_sigma = 0.01;
  bool relinearize = true;
  int window_circuits = 150;
  bool reprior = true;
  double inflation = 1.0;
  int samples = 300;
};

struct GstSettings {
  std::vector<PrimitiveGate> gates{PrimitiveGate::of(GateKind::X1_90), PrimitiveGate::of(GateKind::X2_90),
                                   PrimitiveGate::of(GateKind::CZ), PrimitiveGate::of(GateKind::DCZ)};
  int max_depth = 1;
  int shots = 0;  // 0: exact noise-averaged probabilities
  int quadrature_nodes = 4;
  FiducialStrategy fiducials = FiducialStrategy::ParityNative;
  GaugeGroup gauge = GaugeGroup::Full;
  double taxonomy_threshold = 1e-4;
};

struct FeedbackSettings {
  int cadence = 0;  // circuits between frequency-feedback rounds, 0 = never
  int probe_shots = 200;
};

/// All units SI (Hz, s, V). `runs` is the number of IRB repetitions of the
/// drift demonstration.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Irb;
  DeviceParameters device;
  IrbSettings irb;
  FbtSettings fbt;
  GstSettings gst;
  FeedbackSettings feedback;
  int runs = 20;
  std::uint64_t seed = 1;
  std::filesystem::path output = "run";
};

/// Every problem is collected before throwing a single ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& file);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

/// One circuit to execute, with its own seed.
struct Job {
  Circuit circuit;
  std::string series;
  int length = 0;
  bool expected_odd = false;
  std::uint64_t seed = 0;
};

struct FeedbackEvent {
  double lab_time = 0.0;
  bool success = false;
  std::array<double, 2> detuning{};  // Hz, estimated before the frame update
};

/// Runs jobs in order on an evolving context. Records come back in job order
/// with context_id = context_base + feedback rounds so far. Drift-free devices
/// without feedback are simulated in parallel with identical results.
std::vector<MeasurementRecord> execute_jobs(const DeviceParameters& params, std::span<const Job> jobs, int shots,
                                            ContextState& context, const FeedbackSettings& feedback,
                                            std::uint64_t feedback_seed, long context_base = 0,
                                            std::vector<FeedbackEvent>* events = nullptr);

/// Reference and interleaved jobs for one IRB run; circuit seeds derive from
/// `seed` and the circuit's position in its series.
std::vector<Job> irb_jobs(const IrbSettings& settings, std::uint64_t seed, const std::string& prefix = "");

/// Artifact file names inside a run directory.
namespace artifact {
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kRecords = "records.jsonl";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kReportText = "report.txt";
inline constexpr const char* kTrace = "fbt_trace.json";
inline constexpr const char* kGst = "gst_report.json";
inline constexpr const char* kFeedback = "feedback.csv";
}  // namespace artifact

struct RunSummary {
  std::filesystem::path directory;
  std::vector<std::string> artifacts;
  bool unphysical = false;  // some IRB fit reported F_gate > 1
  nlohmann::ordered_json report;
};

/// Simulates, estimates and writes every artifact into config.output.
RunSummary run_experiment(const ExperimentConfig& config);

/// Human-readable rendering of report.json.
std::string format_report(const nlohmann::json& report);

}  // namespace spincv
