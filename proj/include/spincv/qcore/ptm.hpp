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

#include <span>

#include "spincv/qcore/pauli.hpp"
#include "spincv/qcore/types.hpp"

namespace spincv {

/// Two-qubit density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Mat4c& rho);
  static DensityMatrix pure(const Vec4c& psi);
  static DensityMatrix computational(int basis_index);

  const Mat4c& matrix() const { return rho_; }
  /// Components Tr(P_a rho)/2 in the normalized Pauli basis.
  Vec16 pauli_vector() const;
  static DensityMatrix from_pauli_vector(const Vec16& v);

 private:
  Mat4c rho_;
};

/// 16x16 real representation of a two-qubit channel in the normalized Pauli
/// basis {P/2}: M[a][b] = Tr(P_a E(P_b)) / 4, Pauli order II, IX, IY, IZ, XI, ..., ZZ.
class PauliTransferMatrix {
 public:
  PauliTransferMatrix() : m_(Mat16::Identity()) {}
  explicit PauliTransferMatrix(const Mat16& m) : m_(m) {}

  static PauliTransferMatrix identity() { return {}; }

  const Mat16& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  bool is_trace_preserving(double tol = 1e-9) const;
  bool is_orthogonal(double tol = 1e-9) const;

  /// Channel applied after this one: returns next * this.
  PauliTransferMatrix then(const PauliTransferMatrix& next) const;
  Vec16 apply(const Vec16& v) const;
  PauliTransferMatrix transpose() const { return PauliTransferMatrix(m_.transpose()); }

 private:
  Mat16 m_;
};

PauliTransferMatrix ptm_from_unitary(const Mat4c& u);

/// Channels in time order; the last applied ends up as the leftmost factor.
PauliTransferMatrix compose(std::span<const PauliTransferMatrix> channels);

/// Depolarizing channel that scales every non-identity Pauli component by p.
PauliTransferMatrix depolarizing(double p);

/// Pauli channel rho -> sum_k probs[k] P_k rho P_k.
PauliTransferMatrix pauli_channel(const std::array<double, 16>& probs);

/// Independent phase damping with per-qubit coherence factors c1, c2 in [0, 1].
PauliTransferMatrix phase_damping(double c1, double c2);

/// Effect operator in the normalized Pauli basis: components Tr(P_a E)/2.
Vec16 effect_vector(const Mat4c& effect);

bool is_unitary(const Mat4c& u, double tol = 1e-10);

}  // namespace spincv
