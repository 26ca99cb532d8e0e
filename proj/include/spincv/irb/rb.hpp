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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spincv/device/readout.hpp"
#include "spincv/device/simulator.hpp"
#include "spincv/gates/compiler.hpp"

namespace spincv {

struct RBConfig {
  std::vector<int> lengths{1, 2, 4, 8, 16, 32, 64};
  int randomizations = 200;
  int shots = 100;
  Entangler entangler = Entangler::CZ;  // native entangler used to compile Cliffords
  std::optional<Entangler> interleaved_gate;
  /// Recover to a uniformly random Pauli so both parities are expected equally often.
  bool random_final_pauli = true;
  std::uint64_t seed = 1;

  std::vector<std::string> validation_errors() const;
  void validate() const;
};

struct RBCircuit {
  int length = 0;
  int randomization = 0;
  std::vector<int> cliffords;  // random elements, time order
  int target = -1;  // interleaved element, -1 for reference circuits
  int recovery = 0;
  Circuit circuit;
  bool expected_odd = false;
};

/// Group element of the interleaved target gate.
int target_element(Entangler gate);

std::vector<RBCircuit> generate_rb_circuits(const RBConfig& config);

/// Runs circuits in the given order on the device; context evolves across them.
/// Independent circuits are simulated in parallel when the device has no drift.
std::vector<MeasurementRecord> run_rb(const DeviceParameters& params, std::span<const RBCircuit> circuits, int shots,
                                     std::uint64_t seed, ContextState& context, const SimulationOptions& options,
                                     std::string_view series);

/// Survival counts grouped by length; survival = outcome equals the expected parity.
struct RBDataset {
  std::vector<int> lengths;
  std::vector<std::vector<int>> survived;  // [length][circuit]
  std::vector<std::vector<int>> shots;     // [length][circuit]

  double mean_survival(std::size_t i) const;
  double standard_error(std::size_t i) const;
  std::vector<double> mean_survivals() const;
};

RBDataset dataset_from_records(std::span<const MeasurementRecord> records, std::string_view series);

/// CSV with header "length,mean_survival,stderr".
std::string decay_csv(const RBDataset& data);

}  // namespace spincv
