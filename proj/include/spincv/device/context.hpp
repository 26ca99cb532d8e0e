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

#include "spincv/device/parameters.hpp"
#include "spincv/qcore/random.hpp"

namespace spincv {

struct ContextState {
  double mw_on_time = 0.0;  // s of effective microwave heating
  double lab_time = 0.0;    // s
  std::array<double, 2> walk_offsets{0.0, 0.0};  // Hz
  std::array<double, 2> frame_freqs{0.0, 0.0};   // Hz

  /// Cold device with the frame on the nominal Larmor frequencies.
  static ContextState initial(const DeviceParameters& params);
};

struct NoiseRealization {
  double delta1 = 0.0;  // Hz, includes the walk offset
  double delta2 = 0.0;
  double j_factor = 1.0;
};

/// sigma_i = sqrt(2) / (2 pi T2*_i): Ramsey decay exp(-(tau/T2*)^2).
double quasistatic_sigma(double t2star);

NoiseRealization sample_noise_realization(const DeviceParameters& params, const ContextState& context, Rng& rng);

/// Saturating microwave-heating Larmor shift of one qubit.
double heating_shift(const DeviceParameters& params, const ContextState& context, int qubit);

/// Drive-frame detuning f_i + shift_i + delta_i - frame_i.
double frame_detuning(const DeviceParameters& params, const ContextState& context, const NoiseRealization& noise,
                      int qubit);

/// Microwave time accumulates heat; microwave-free lab time relaxes the heating
/// shift by exp(-t/cooldown_tau). Walk offsets take a Gaussian step with std
/// walk_sigma * sqrt(elapsed_lab).
ContextState advance_context(const ContextState& context, const DeviceParameters& params, double elapsed_mw,
                             double elapsed_lab, Rng& rng);

}  // namespace spincv
