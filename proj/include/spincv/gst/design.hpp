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

#include <span>
#include <string>
#include <vector>

#include "spincv/common/errors.hpp"
#include "spincv/gates/gate.hpp"
#include "spincv/qcore/ptm.hpp"

namespace spincv {

enum class FiducialStrategy {
  ParityNative,            // fiducials may include the entangler next to the parity readout
  SingleQubitProjection,   // local rotations followed by a map of one qubit's Z onto the parity
  None,                    // empty fiducials only
};

struct GSTDesign {
  std::vector<PrimitiveGate> gates;  // estimated (non-virtual) gates
  std::vector<Circuit> prep_fiducials;
  std::vector<Circuit> meas_fiducials;
  std::vector<Circuit> germs;
  std::vector<int> depths;
  std::vector<Circuit> circuits;  // prep fiducial, germ power, meas fiducial (time order), deduplicated
  int prep_rank = 0;
  int meas_rank = 0;
};

class DesignFailure : public ValidationError {
 public:
  DesignFailure(const std::string& what, int prep_rank, int meas_rank)
      : ValidationError(what), prep_rank(prep_rank), meas_rank(meas_rank) {}
  int prep_rank;
  int meas_rank;
};

/// Ideal PTM of a circuit (virtual gates included).
PauliTransferMatrix ideal_circuit_ptm(const Circuit& circuit);

/// Numerical rank of the ideal prepared states {F rho0}.
int preparation_rank(std::span<const Circuit> fiducials);
/// Numerical rank of the pulled-back parity effects {F^T E_even, F^T E_odd}.
int measurement_rank(std::span<const Circuit> fiducials);

/// Single-qubit fiducial words on one qubit: {}, X, X^2, X^3, Y, Y^3, with Y
/// built from X between virtual Z frames.
std::vector<Circuit> single_qubit_fiducials(int qubit);

GSTDesign design_experiment(std::span<const PrimitiveGate> gates, int max_depth,
                            FiducialStrategy strategy = FiducialStrategy::ParityNative);

}  // namespace spincv
