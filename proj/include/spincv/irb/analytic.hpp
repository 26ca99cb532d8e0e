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
#include <string_view>
#include <vector>

#include "spincv/irb/rb.hpp"

namespace spincv {

/// Gate-independent global depolarizing noise: every Clifford (including the recovery) is
/// followed by a depolarizing channel with parameter clifford_p, the interleaved target by
/// target_p. Depolarizing with parameter p scales every non-identity Pauli component by p.
struct DepolarizingRBModel {
  double clifford_p = 1.0;
  double target_p = 1.0;
  SpamParameters spam;
};

/// Depolarizing parameter whose channel has the given average gate fidelity (d = 4).
double depolarizing_parameter(double average_fidelity);

/// Noise-free Pauli-vector propagation through the sequence, with depolarizing after each element.
double analytic_survival(const DepolarizingRBModel& model, const RBCircuit& circuit);

std::vector<MeasurementRecord> run_rb_analytic(const DepolarizingRBModel& model, std::span<const RBCircuit> circuits,
                                              int shots, std::uint64_t seed,
                                              std::string_view series);

}  // namespace spincv
