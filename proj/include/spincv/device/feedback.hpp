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

#include <array>
#include <cstdint>

#include "spincv/device/simulator.hpp"

namespace spincv {

struct FeedbackOptions {
  double tau_coarse = 1e-6;   // s, unambiguous range +-1/(2 tau_coarse)
  double tau_fine = 10e-6;    // s
  double min_visibility = 0.1;
};

struct FeedbackResult {
  ContextState context;
  bool success = true;                       // false: frames left unchanged
  std::array<double, 2> estimated_detuning{};  // Hz, applied to frame_freqs on success
  std::array<double, 2> visibility{};          // at tau_coarse
};

/// Two-point Ramsey estimate of each qubit's detuning from its drive frame
/// (cosine and sine quadratures at two free-evolution times), then a frame
/// update. Probe circuits run on the simulator and advance the context.
FeedbackResult apply_feedback(const DeviceParameters& params, const ContextState& context, int probe_shots,
                              std::uint64_t seed, const SimulationOptions& sim = {},
                              const FeedbackOptions& options = {});

/// Probe circuit X, idle(tau), [VZ(pi/2)], X on one qubit.
Circuit ramsey_circuit(int qubit, double tau, bool sine_quadrature);

}  // namespace spincv
