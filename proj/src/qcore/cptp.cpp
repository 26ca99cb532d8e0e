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

#include "spincv/qcore/cptp.hpp"

#include <cstdint>

#include <Eigen/Eigenvalues>

namespace spincv {
namespace {

// P_b^T (x) P_a has exactly one nonzero per row.
struct SparseBasis {
  std::array<std::uint8_t, 16> col;
  std::array<Complex, 16> val;
};

const SparseBasis& basis(int a, int b) {
  static const auto table = [] {
    std::array<std::array<SparseBasis, 16>, 16> t;
    const auto& p = pauli_matrices();
    for (int bb = 0; bb < 16; ++bb)
      for (int a = 0; a < 16; ++a) {
        const Mat4c pt = p[bb].transpose();
        Mat16c k;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) k.block<4, 4>(4 * i, 4 * j) = pt(i, j) * p[a];
        SparseBasis& s = t[a][bb];
        for (int r = 0; r < 16; ++r)
          for (int c = 0; c < 16; ++c)
            if (std::abs(k(r, c)) > 0.5) {
              s.col[r] = static_cast<std::uint8_t>(c);
              s.val[r] = k(r, c);
            }
      }
    return t;
  }();
  return table[a][b];
}

Mat16 project_tp(Mat16 m) {
  m.row(0).setZero();
  m(0, 0) = 1.0;
  return m;
}

Mat16 project_cp(const Mat16& m) {
  const Mat16c j = choi_from_ptm(PauliTransferMatrix(m));
  Eigen::SelfAdjointEigenSolver<Mat16c> es(j);
  if (es.eigenvalues().minCoeff() >= 0.0) return m;
  const Eigen::Matrix<double, 16, 1> clipped = es.eigenvalues().cwiseMax(0.0);
  const Mat16c fixed = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  return ptm_from_choi(fixed).matrix();
}

}  // namespace

Mat16c choi_from_ptm(const PauliTransferMatrix& m) {
  Mat16c j = Mat16c::Zero();
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      const double w = 0.25 * m(a, b);
      if (w == 0.0) continue;
      const SparseBasis& s = basis(a, b);
      for (int r = 0; r < 16; ++r) j(r, s.col[r]) += w * s.val[r];
    }
  return j;
}

PauliTransferMatrix ptm_from_choi(const Mat16c& choi) {
  Mat16 m;
  // Tr(J K) with K Hermitian equals the real part of sum_ij J_ij conj(K_ij).
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      const SparseBasis& s = basis(a, b);
      Complex acc = 0.0;
      for (int r = 0; r < 16; ++r) acc += choi(r, s.col[r]) * std::conj(s.val[r]);
      m(a, b) = 0.25 * acc.real();
    }
  return PauliTransferMatrix(m);
}

CptpCheck cptp_check(const PauliTransferMatrix& m) {
  CptpCheck out;
  out.is_tp = m.is_trace_preserving(1e-9);
  Eigen::SelfAdjointEigenSolver<Mat16c> es(choi_from_ptm(m), Eigen::EigenvaluesOnly);
  out.min_choi_eigenvalue = es.eigenvalues().minCoeff();
  return out;
}

CptpProjection cptp_project(const PauliTransferMatrix& input, double tol, int max_iterations) {
  const Mat16& m0 = input.matrix();
  Mat16 x = m0;
  Mat16 p = Mat16::Zero();
  Mat16 q = Mat16::Zero();
  CptpProjection out;
  for (int it = 1; it <= max_iterations; ++it) {
    const Mat16 y = project_tp(x + p);
    p = x + p - y;
    const Mat16 next = project_cp(y + q);
    q = y + q - next;
    const double change = (next - x).norm();
    x = next;
    out.iterations = it;
    if (change < tol) {
      out.converged = true;
      break;
    }
  }
  // Restore the affine constraint exactly, then absorb the leftover negative
  // Choi weight by mixing in the completely depolarizing map (Choi = I/4).
  x = project_tp(x);
  const double min_eig = cptp_check(PauliTransferMatrix(x)).min_choi_eigenvalue;
  if (min_eig < 0.0) {
    const double t = -min_eig / (0.25 - min_eig);
    x = (1.0 - t) * x + t * depolarizing(0.0).matrix();
  }
  out.ptm = PauliTransferMatrix(x);
  out.distance = (x - m0).norm();
  return out;
}

}  // namespace spincv
