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

#include "spincv/qcore/ptm.hpp"

#include <Eigen/Eigenvalues>

#include "spincv/common/errors.hpp"
#include "spincv/kernels/kernels.hpp"

namespace spincv {

DensityMatrix::DensityMatrix(const Mat4c& rho) : rho_(rho) {
  if ((rho - rho.adjoint()).norm() > 1e-12) throw ValidationError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-12)
    throw ValidationError("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Mat4c> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw ValidationError("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const Vec4c& psi) {
  const Vec4c n = psi / psi.norm();
  return DensityMatrix(n * n.adjoint());
}

DensityMatrix DensityMatrix::computational(int basis_index) {
  Vec4c psi = Vec4c::Zero();
  psi(basis_index) = 1.0;
  return pure(psi);
}

Vec16 DensityMatrix::pauli_vector() const {
  Vec16 v;
  const auto& paulis = pauli_matrices();
  for (int a = 0; a < 16; ++a) v(a) = 0.5 * (paulis[a] * rho_).trace().real();
  return v;
}

DensityMatrix DensityMatrix::from_pauli_vector(const Vec16& v) {
  Mat4c rho = Mat4c::Zero();
  const auto& paulis = pauli_matrices();
  for (int a = 0; a < 16; ++a) rho += 0.5 * v(a) * paulis[a];
  return DensityMatrix(rho);
}

bool PauliTransferMatrix::is_trace_preserving(double tol) const {
  if (std::abs(m_(0, 0) - 1.0) > tol) return false;
  for (int c = 1; c < 16; ++c)
    if (std::abs(m_(0, c)) > tol) return false;
  return true;
}

bool PauliTransferMatrix::is_orthogonal(double tol) const {
  return (m_ * m_.transpose() - Mat16::Identity()).cwiseAbs().maxCoeff() <= tol;
}

PauliTransferMatrix PauliTransferMatrix::then(const PauliTransferMatrix& next) const {
  Mat16 out;
  kernels::active().gemm(next.m_.data(), 16, m_.data(), 16, out.data(), 16, 16, 16, 16);
  return PauliTransferMatrix(out);
}

Vec16 PauliTransferMatrix::apply(const Vec16& v) const {
  Vec16 out;
  kernels::active().gemv(m_.data(), 16, v.data(), out.data(), 16, 16);
  return out;
}

bool is_unitary(const Mat4c& u, double tol) {
  return (u * u.adjoint() - Mat4c::Identity()).cwiseAbs().maxCoeff() <= tol;
}

PauliTransferMatrix ptm_from_unitary(const Mat4c& u) {
  if (!is_unitary(u)) throw ValidationError("ptm_from_unitary: matrix is not unitary within 1e-10");
  const auto& paulis = pauli_matrices();
  std::array<Mat4c, 16> images;
  for (int b = 0; b < 16; ++b) images[b] = u * paulis[b] * u.adjoint();
  Mat16 m;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b)
      m(a, b) = 0.25 * (paulis[a].cwiseProduct(images[b].transpose())).sum().real();
  return PauliTransferMatrix(m);
}

PauliTransferMatrix compose(std::span<const PauliTransferMatrix> channels) {
  if (channels.empty()) throw ValidationError("compose: empty channel list");
  PauliTransferMatrix acc = channels.front();
  for (std::size_t k = 1; k < channels.size(); ++k) acc = acc.then(channels[k]);
  return acc;
}

PauliTransferMatrix depolarizing(double p) {
  Mat16 m = p * Mat16::Identity();
  m(0, 0) = 1.0;
  return PauliTransferMatrix(m);
}

PauliTransferMatrix pauli_channel(const std::array<double, 16>& probs) {
  Mat16 m = Mat16::Zero();
  for (int a = 0; a < 16; ++a) {
    double d = 0.0;
    for (int k = 0; k < 16; ++k)
      d += (PauliString(a).commutes_with(PauliString(k)) ? 1.0 : -1.0) * probs[k];
    m(a, a) = d;
  }
  return PauliTransferMatrix(m);
}

PauliTransferMatrix phase_damping(double c1, double c2) {
  Mat16 m = Mat16::Zero();
  for (int a = 0; a < 16; ++a) {
    const PauliString p(a);
    double f = 1.0;
    if (p.first() == 1 || p.first() == 2) f *= c1;
    if (p.second() == 1 || p.second() == 2) f *= c2;
    m(a, a) = f;
  }
  return PauliTransferMatrix(m);
}

Vec16 effect_vector(const Mat4c& effect) {
  Vec16 v;
  const auto& paulis = pauli_matrices();
  for (int a = 0; a < 16; ++a) v(a) = 0.5 * (paulis[a] * effect).trace().real();
  return v;
}

}  // namespace spincv
