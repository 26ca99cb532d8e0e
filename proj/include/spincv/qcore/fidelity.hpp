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

#include "spincv/qcore/ptm.hpp"

namespace spincv {

struct FidelityMetrics {
  double process_fidelity;
  double average_gate_fidelity;
};

/// Process fidelity Tr(ideal^T actual)/16 and average gate fidelity (4 F_pro + 1)/5.
/// `ideal` must be unitary-derived (orthogonal within 1e-9).
FidelityMetrics fidelity_metrics(const PauliTransferMatrix& actual,
                                 const PauliTransferMatrix& ideal);

inline double average_from_process(double process_fidelity) {
  return (4.0 * process_fidelity + 1.0) / 5.0;
}

}  // namespace spincv
