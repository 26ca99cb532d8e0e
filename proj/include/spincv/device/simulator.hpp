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
#include <vector>

#include "spincv/device/context.hpp"
#include "spincv/device/readout.hpp"
#include "spincv/gates/gate.hpp"
#include "spincv/qcore/ptm.hpp"

namespace spincv {

struct SimulationOptions {
  bool crosstalk = true;            // spectator driving and drive-induced Stark shifts
  bool quasistatic_noise = true;    // T2*-distributed detunings per shot
  bool markovian_dephasing = true;  // T2Hahn phase damping per primitive
  bool exchange_noise = true;       // log-normal J factor per shot
};

struct PrimitiveResult {
  Mat4c unitary = Mat4c::Identity();
  std::array<double, 2> dephasing_rate{0.0, 0.0};  // 1/s, applied over `duration`
  double duration = 0.0;                            // s
  double mw_time = 0.0;                             // s of microwave drive

  std::array<double, 2> coherence() const;
  PauliTransferMatrix ptm() const;
};

/// Drive-frame propagator of one primitive. Single-tone pulses are solved
/// exactly in the tone frame and rotated back into the spectator's frame;
/// the simultaneous echo uses the static two-tone Hamiltonian with
/// second-order Stark shifts; Idle, CZ and DCZ_half are diagonal.
/// DCZ is a composite and must be expanded first.
PrimitiveResult simulate_primitive(const DeviceParameters& params, const ContextState& context,
                                   const NoiseRealization& noise, const PrimitiveGate& gate,
                                   const SimulationOptions& options = {});

/// Piecewise-constant reference integrator with full time-dependent drive
/// phases, step <= 1/(50 * max frequency). Throws ValidationError when the
/// required step count exceeds max_steps.
PrimitiveResult simulate_primitive_stepped(const DeviceParameters& params, const ContextState& context,
                                           const NoiseRealization& noise, const PrimitiveGate& gate,
                                           const SimulationOptions& options = {}, long max_steps = 5'000'000);

/// Replaces DCZ by its primitive expansion.
Circuit expand_composites(const Circuit& circuit);

double circuit_duration(const DeviceParameters& params, const Circuit& circuit);
double circuit_mw_time(const DeviceParameters& params, const Circuit& circuit);

/// Final density matrix of one noise realization. Heating accumulates gate by
/// gate in a private copy of the context.
Mat4c evolve_density(const DeviceParameters& params, const Circuit& circuit, const NoiseRealization& noise,
                     const ContextState& context, const SimulationOptions& options, const Mat4c& rho0);

/// Monte Carlo parity measurement. Each shot draws its own noise realization
/// from derive_seed(seed, shot); the context advances shot by shot (heating,
/// cooldown over the readout time, walk, lab time).
MeasurementRecord run_circuit(const DeviceParameters& params, const Circuit& circuit, int shots, std::uint64_t seed,
                              ContextState& context, const SimulationOptions& options = {});

struct QuadratureNode {
  NoiseRealization noise;
  double weight = 0.0;
};

/// Tensor Gauss-Hermite rule over the quasistatic detunings and the J factor.
std::vector<QuadratureNode> noise_quadrature(const DeviceParameters& params, const ContextState& context,
                                             const SimulationOptions& options, int nodes_per_dimension = 8);

/// Noise-averaged probability of reporting even parity (no shot noise).
double expected_even_probability(const DeviceParameters& params, const Circuit& circuit, const ContextState& context,
                                 const SimulationOptions& options = {}, int nodes_per_dimension = 8);

/// Noise-averaged PTM of a circuit at a fixed context.
PauliTransferMatrix average_channel(const DeviceParameters& params, const Circuit& circuit,
                                    const ContextState& context, const SimulationOptions& options = {},
                                    int nodes_per_dimension = 8);

/// Gauss-Hermite nodes and weights for the standard normal density.
std::vector<std::pair<double, double>> gauss_hermite(int n);

}  // namespace spincv
