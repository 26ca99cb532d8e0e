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

#include "spincv/device/context.hpp"

#include <cmath>

#include "spincv/common/errors.hpp"
#include "spincv/qcore/types.hpp"

namespace spincv {

ContextState ContextState::initial(const DeviceParameters& params) {
  ContextState c;
  c.frame_freqs = {params.f1, params.f2};
  return c;
}

double quasistatic_sigma(double t2star) { return std::sqrt(2.0) / (kTwoPi * t2star); }

NoiseRealization sample_noise_realization(const DeviceParameters& params, const ContextState& context, Rng& rng) {
  NoiseRealization n;
  n.delta1 = context.walk_offsets[0] + quasistatic_sigma(params.t2star1) * standard_normal(rng);
  n.delta2 = context.walk_offsets[1] + quasistatic_sigma(params.t2star2) * standard_normal(rng);
  const double z = standard_normal(rng);
  n.j_factor = params.j_sigma > 0.0 ? std::exp(std::log1p(params.j_sigma) * z) : 1.0;
  return n;
}

double heating_shift(const DeviceParameters& params, const ContextState& context, int qubit) {
  const double a = qubit == 0 ? params.drift.heating_amplitude1 : params.drift.heating_amplitude2;
  if (a == 0.0) return 0.0;
  return a * -std::expm1(-context.mw_on_time / params.drift.heating_tau);
}

double frame_detuning(const DeviceParameters& params, const ContextState& context, const NoiseRealization& noise,
                      int qubit) {
  const double f = qubit == 0 ? params.f1 : params.f2;
  const double delta = qubit == 0 ? noise.delta1 : noise.delta2;
  return (f - context.frame_freqs[qubit]) + heating_shift(params, context, qubit) + delta;
}

ContextState advance_context(const ContextState& context, const DeviceParameters& params, double elapsed_mw,
                             double elapsed_lab, Rng& rng) {
  if (elapsed_mw < 0.0 || elapsed_lab < 0.0) throw ValidationError("advance_context: negative elapsed time");
  ContextState next = context;
  next.mw_on_time += elapsed_mw;
  next.lab_time += elapsed_lab;
  const double idle = std::max(0.0, elapsed_lab - elapsed_mw);
  if (idle > 0.0 && next.mw_on_time > 0.0) {
    // Relax the heat so the saturating shift decays by exp(-idle/cooldown_tau).
    const double tau_h = params.drift.heating_tau;
    const double level = -std::expm1(-next.mw_on_time / tau_h) * std::exp(-idle / params.drift.cooldown_tau);
    next.mw_on_time = level > 0.0 ? -tau_h * std::log1p(-level) : 0.0;
  }
  if (params.drift.walk_sigma > 0.0 && elapsed_lab > 0.0) {
    const double step = params.drift.walk_sigma * std::sqrt(elapsed_lab);
    for (auto& w : next.walk_offsets) w += step * standard_normal(rng);
  }
  return next;
}

}  // namespace spincv
