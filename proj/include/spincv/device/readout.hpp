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

#include <string>

#include "spincv/device/parameters.hpp"
#include "spincv/gates/gate.hpp"
#include "spincv/qcore/ptm.hpp"

namespace spincv {

struct ParityProbabilities {
  double p_even = 1.0;
  double p_odd = 0.0;
};

/// Ideal POVM E_even = (II + ZZ)/2 followed by classical readout flips.
ParityProbabilities parity_probabilities(const DensityMatrix& rho, const SpamParameters& spam);
ParityProbabilities parity_probabilities(const Mat4c& rho, const SpamParameters& spam);

/// (1 - e)|00><00| + e (|01><01| + |10><10|) / 2.
DensityMatrix initial_state(const SpamParameters& spam);

/// Effective even-parity effect in the normalized Pauli basis, flips included.
Vec16 even_effect_vector(const SpamParameters& spam);

/// One circuit's parity counts.
struct MeasurementRecord {
  Circuit circuit;
  int shots = 0;
  int even_count = 0;
  int odd_count = 0;
  double lab_time = 0.0;  // s at circuit start
  long context_id = 0;
  std::string series;      // e.g. "reference", "interleaved", "gst"
  int length = 0;          // RB length, germ power, ...
  bool expected_odd = false;

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

}  // namespace spincv
