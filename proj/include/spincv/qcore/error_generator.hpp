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

#include "spincv/qcore/ptm.hpp"

namespace spincv {

/// Hamiltonian and Pauli-stochastic coefficients of a post-gate error
/// generator over the 15 non-identity two-qubit Paulis (entry k <-> Pauli k+1).
struct ErrorGeneratorDecomposition {
  std::array<double, 15> hamiltonian{};
  std::array<double, 15> stochastic{};
  double residual_norm = 0.0;

  double h(PauliString p) const { return hamiltonian.at(p.index() - 1); }
  double s(PauliString p) const { return stochastic.at(p.index() - 1); }
  double& h(PauliString p) { return hamiltonian.at(p.index() - 1); }
  double& s(PauliString p) { return stochastic.at(p.index() - 1); }
};

/// PTM of the generator rho -> -i[P, rho].
const Mat16& hamiltonian_generator(PauliString p);
/// PTM of the generator rho -> P rho P - rho.
const Mat16& stochastic_generator(PauliString p);

Mat16 generator_matrix(const ErrorGeneratorDecomposition& coefficients);

/// exp(L) * ideal for the generator L built from the coefficients.
PauliTransferMatrix apply_error_generator(const ErrorGeneratorDecomposition& coefficients,
                                          const PauliTransferMatrix& ideal);

/// Principal real logarithm. Throws GeneratorUndefined when an eigenvalue sits
/// on (or numerically at) the closed negative real axis.
Mat16 principal_log(const Mat16& m);

/// Projects log(actual * ideal^-1) onto the Hamiltonian and stochastic
/// generator families; what is left over is reported as residual_norm.
ErrorGeneratorDecomposition error_generator_decompose(const PauliTransferMatrix& actual,
                                                      const PauliTransferMatrix& ideal);

/// Coefficients of an arbitrary generator matrix.
ErrorGeneratorDecomposition project_generator(const Mat16& generator);

}  // namespace spincv
