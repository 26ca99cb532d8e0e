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
#include <span>
#include <string>
#include <vector>

#include "spincv/fbt/model.hpp"
#include "spincv/qcore/random.hpp"

namespace spincv {

struct GateFidelitySummary {
  GateKind gate = GateKind::CZ;
  double f_mean = 0.0;  // posterior-mean PTM, CPTP-projected
  double f_low = 0.0;   // 2.5th percentile
  double f_median = 0.0;
  double f_high = 0.0;  // 97.5th percentile
};

struct SummaryOptions {
  int samples = 500;
  double projection_tol = 1e-8;
  int projection_iterations = 2000;
};

/// Samples the posterior of one tracked gate, projects every sample to CPTP, and summarizes the
/// average gate fidelity.
GateFidelitySummary summarize_gate(const GateErrorModel& model, int gate, Rng& rng, const SummaryOptions& options = {});

struct PosteriorSnapshot {
  double lab_time = 0.0;  // last record in the window
  int window = 0;
  int circuits = 0;
  std::vector<GateFidelitySummary> gates;
};

struct TraceOptions {
  int window_circuits = 500;   // used when window_seconds <= 0
  double window_seconds = 0.0;
  /// Covariance inflation applied before every window after the first.
  double inflation = 1.0;
  /// Start every window from the prior instead of inflating.
  bool reprior = false;
  std::vector<GateKind> report;  // empty = every tracked gate
  SummaryOptions summary;
  std::uint64_t seed = 1;
};

/// Processes a lab-time-ordered record stream window by window. `model` holds the prior on entry
/// and the final posterior on exit.
std::vector<PosteriorSnapshot> fidelity_trace(GateErrorModel& model, std::span<const MeasurementRecord> stream,
                                              const TraceOptions& options = {});

/// CSV with header "lab_time,gate,F_median,F_low,F_high".
std::string snapshot_csv(std::span<const PosteriorSnapshot> snapshots);

}  // namespace spincv
