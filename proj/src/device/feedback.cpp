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

#include "spincv/device/feedback.hpp"

#include <cmath>

#include "spincv/common/errors.hpp"
#include "spincv/common/seed.hpp"

namespace spincv {

Circuit ramsey_circuit(int qubit, double tau, bool sine_quadrature) {
  const PrimitiveGate x = PrimitiveGate::of(qubit == 0 ? GateKind::X1_90 : GateKind::X2_90);
  Circuit c{x, PrimitiveGate::idle(tau)};
  if (sine_quadrature) c.push_back(qubit == 0 ? PrimitiveGate::vz1(kPi / 2) : PrimitiveGate::vz2(kPi / 2));
  c.push_back(x);
  return c;
}

FeedbackResult apply_feedback(const DeviceParameters& params, const ContextState& context, int probe_shots,
                              std::uint64_t seed, const SimulationOptions& sim, const FeedbackOptions& options) {
  if (probe_shots < 1) throw ValidationError("apply_feedback: probe_shots must be >= 1");
  if (!(options.tau_fine > options.tau_coarse && options.tau_coarse > 0.0))
    throw ValidationError("apply_feedback: need 0 < tau_coarse < tau_fine");
  FeedbackResult out;
  out.context = context;
  ContextState& ctx = out.context;
  std::uint64_t counter = 0;
  auto phase = [&](int q, double tau, double& visibility) {
    double quad[2];
    for (int s = 0; s < 2; ++s) {
      const auto rec = run_circuit(params, ramsey_circuit(q, tau, s == 1), probe_shots, derive_seed(seed, counter++),
                                   ctx, sim);
      const double p_odd = static_cast<double>(rec.odd_count) / rec.shots;
      quad[s] = s == 0 ? 2.0 * p_odd - 1.0 : 1.0 - 2.0 * p_odd;
    }
    visibility = std::hypot(quad[0], quad[1]);
    return std::atan2(quad[1], quad[0]);
  };
  std::array<double, 2> correction{};
  for (int q = 0; q < 2; ++q) {
    double vis_coarse = 0.0, vis_fine = 0.0;
    const double phi1 = phase(q, options.tau_coarse, vis_coarse);
    const double phi2 = phase(q, options.tau_fine, vis_fine);
    out.visibility[q] = vis_coarse;
    if (vis_coarse < options.min_visibility) {
      out.success = false;
      continue;
    }
    const double coarse = phi1 / (kTwoPi * options.tau_coarse);
    double estimate = coarse;
    if (vis_fine >= options.min_visibility) {
      // Phase difference cancels the precession accumulated during the pulses.
      const double span = options.tau_fine - options.tau_coarse;
      const double base = (phi2 - phi1) / (kTwoPi * span);
      const double k = std::round((coarse - base) * span);
      estimate = base + k / span;
    }
    correction[q] = estimate;
  }
  out.estimated_detuning = correction;
  if (out.success)
    for (int q = 0; q < 2; ++q) ctx.frame_freqs[q] += correction[q];
  return out;
}

}  // namespace spincv
