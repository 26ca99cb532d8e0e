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

#include "spincv/device/readout.hpp"

namespace spincv {

ParityProbabilities parity_probabilities(const Mat4c& rho, const SpamParameters& spam) {
  const double even = rho(0, 0).real() + rho(3, 3).real();
  const double odd = rho(1, 1).real() + rho(2, 2).real();
  const double total = even + odd;
  const double pe = even / total;
  const double po = odd / total;
  ParityProbabilities out;
  out.p_even = (1.0 - spam.readout_flip_even) * pe + spam.readout_flip_odd * po;
  out.p_odd = 1.0 - out.p_even;
  return out;
}

ParityProbabilities parity_probabilities(const DensityMatrix& rho, const SpamParameters& spam) {
  return parity_probabilities(rho.matrix(), spam);
}

DensityMatrix initial_state(const SpamParameters& spam) {
  Mat4c rho = Mat4c::Zero();
  rho(0, 0) = 1.0 - spam.init_error;
  rho(1, 1) = 0.5 * spam.init_error;
  rho(2, 2) = 0.5 * spam.init_error;
  return DensityMatrix(rho);
}

Vec16 even_effect_vector(const SpamParameters& spam) {
  // E = (1 - fe) E_even + fo E_odd with E_even = (II + ZZ)/2, E_odd = (II - ZZ)/2.
  const double fe = spam.readout_flip_even, fo = spam.readout_flip_odd;
  Mat4c e = Mat4c::Zero();
  e(0, 0) = e(3, 3) = 1.0 - fe;
  e(1, 1) = e(2, 2) = fo;
  return effect_vector(e);
}

}  // namespace spincv
