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

#include "spincv/irb/analytic.hpp"

#include <algorithm>
#include <random>

#include "spincv/common/errors.hpp"
#include "spincv/common/parallel.hpp"
#include "spincv/common/seed.hpp"
#include "spincv/qcore/random.hpp"

namespace spincv {

double depolarizing_parameter(double average_fidelity) {
  if (!(average_fidelity > 0.0 && average_fidelity <= 1.0))
    throw ValidationError("depolarizing_parameter: fidelity must lie in (0, 1]");
  return 1.0 - 4.0 * (1.0 - average_fidelity) / 3.0;
}

namespace {

// Signed permutation action of a Clifford on a Pauli vector.
Vec16 apply_map(const PauliMap& m, const Vec16& v) {
  Vec16 out = Vec16::Zero();
  for (int a = 0; a < 16; ++a) {
    const double sign = (m[a] & 0x10) ? -1.0 : 1.0;
    out(m[a] & 0xF) += sign * v(a);
  }
  return out;
}

}  // namespace

double analytic_survival(const DepolarizingRBModel& model, const RBCircuit& circuit) {
  const auto& group = CliffordGroup::standard();
  Vec16 v = initial_state(model.spam).pauli_vector();
  auto step = [&](int element, double p) {
    v = apply_map(group.map(element), v);
    v.tail<15>() *= p;
  };
  for (int e : circuit.cliffords) {
    step(e, model.clifford_p);
    if (circuit.target >= 0) step(circuit.target, model.target_p);
  }
  step(circuit.recovery, model.clifford_p);
  const double p_even = even_effect_vector(model.spam).dot(v);
  return circuit.expected_odd ? 1.0 - p_even : p_even;
}

std::vector<MeasurementRecord> run_rb_analytic(const DepolarizingRBModel& model, std::span<const RBCircuit> circuits,
                                              int shots, std::uint64_t seed, std::string_view series) {
  if (shots < 1) throw ValidationError("run_rb_analytic: shots must be >= 1");
  std::vector<MeasurementRecord> out(circuits.size());
  parallel_for(circuits.size(), [&](std::size_t i) {
    const auto& c = circuits[i];
    const double survival = std::clamp(analytic_survival(model, c), 0.0, 1.0);
    Rng rng(derive_seed(seed, i));
    const int hits = std::binomial_distribution<int>(shots, survival)(rng);
    MeasurementRecord& r = out[i];
    r.circuit = c.circuit;
    r.shots = shots;
    r.odd_count = c.expected_odd ? hits : shots - hits;
    r.even_count = shots - r.odd_count;
    r.series = std::string(series);
    r.length = c.length;
    r.expected_odd = c.expected_odd;
    r.context_id = static_cast<long>(i);
  });
  return out;
}

}  // namespace spincv
