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

#include "spincv/qcore/error_generator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "spincv/common/errors.hpp"

namespace spincv {
namespace {

using ColMat16 = Eigen::Matrix<double, 16, 16>;

Mat16 superop_ptm(const auto& map) {
  const auto& paulis = pauli_matrices();
  Mat16 m;
  for (int b = 0; b < 16; ++b) {
    const Mat4c image = map(paulis[b]);
    for (int a = 0; a < 16; ++a) m(a, b) = 0.25 * (paulis[a] * image).trace().real();
  }
  return m;
}

struct GeneratorBasis {
  std::array<Mat16, 15> hamiltonian;
  std::array<Mat16, 15> stochastic;
  Eigen::Matrix<double, 15, 15> stochastic_gram_inverse;
};

const GeneratorBasis& basis() {
  static const GeneratorBasis b = [] {
    GeneratorBasis out;
    const Complex i(0.0, 1.0);
    for (int k = 1; k < 16; ++k) {
      const Mat4c& p = PauliString(k).matrix();
      out.hamiltonian[k - 1] = superop_ptm([&](const Mat4c& x) -> Mat4c { return -i * (p * x - x * p); });
      out.stochastic[k - 1] = superop_ptm([&](const Mat4c& x) -> Mat4c { return p * x * p - x; });
    }
    Eigen::Matrix<double, 15, 15> gram;
    for (int a = 0; a < 15; ++a)
      for (int c = 0; c < 15; ++c)
        gram(a, c) = out.stochastic[a].cwiseProduct(out.stochastic[c]).sum();
    out.stochastic_gram_inverse = gram.inverse();
    return out;
  }();
  return b;
}

}  // namespace

const Mat16& hamiltonian_generator(PauliString p) {
  if (p.is_identity()) throw ValidationError("no Hamiltonian generator for II");
  return basis().hamiltonian[p.index() - 1];
}

const Mat16& stochastic_generator(PauliString p) {
  if (p.is_identity()) throw ValidationError("no stochastic generator for II");
  return basis().stochastic[p.index() - 1];
}

Mat16 generator_matrix(const ErrorGeneratorDecomposition& c) {
  const auto& b = basis();
  Mat16 l = Mat16::Zero();
  for (int k = 0; k < 15; ++k) l += c.hamiltonian[k] * b.hamiltonian[k] + c.stochastic[k] * b.stochastic[k];
  return l;
}

PauliTransferMatrix apply_error_generator(const ErrorGeneratorDecomposition& coefficients,
                                          const PauliTransferMatrix& ideal) {
  const ColMat16 l = generator_matrix(coefficients);
  const Mat16 e = l.exp();
  return ideal.then(PauliTransferMatrix(e));
}

Mat16 principal_log(const Mat16& m) {
  const ColMat16 a = m;
  Eigen::EigenSolver<ColMat16> es(a, false);
  if (es.info() != Eigen::Success) throw GeneratorUndefined("generator undefined: eigensolver failed");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int k = 0; k < 16; ++k) {
    const Complex lambda = es.eigenvalues()(k);
    if (std::abs(lambda) < 1e-12 * scale)
      throw GeneratorUndefined("generator undefined: singular channel");
    if (lambda.real() < 0.0 && std::abs(lambda.imag()) <= 1e-8 * std::abs(lambda))
      throw GeneratorUndefined("generator undefined: eigenvalue on the negative real axis");
  }
  const ColMat16 l = a.log();
  if (!l.allFinite() || (ColMat16(l.exp()) - a).norm() > 1e-8 * a.norm())
    throw GeneratorUndefined("generator undefined: logarithm did not reproduce the channel");
  return Mat16(l);
}

ErrorGeneratorDecomposition project_generator(const Mat16& l) {
  const auto& b = basis();
  ErrorGeneratorDecomposition out;
  Eigen::Matrix<double, 15, 1> overlaps;
  for (int k = 0; k < 15; ++k) {
    out.hamiltonian[k] = b.hamiltonian[k].cwiseProduct(l).sum() / b.hamiltonian[k].squaredNorm();
    overlaps(k) = b.stochastic[k].cwiseProduct(l).sum();
  }
  const Eigen::Matrix<double, 15, 1> s = b.stochastic_gram_inverse * overlaps;
  for (int k = 0; k < 15; ++k) out.stochastic[k] = s(k);
  out.residual_norm = (l - generator_matrix(out)).norm();
  return out;
}

ErrorGeneratorDecomposition error_generator_decompose(const PauliTransferMatrix& actual,
                                                      const PauliTransferMatrix& ideal) {
  if (!ideal.is_orthogonal(1e-9))
    throw ValidationError("error_generator_decompose: ideal channel is not unitary-derived");
  const Mat16 error = actual.matrix() * ideal.matrix().transpose();
  return project_generator(principal_log(error));
}

}  // namespace spincv
