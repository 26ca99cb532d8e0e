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

#include "spincv/qcore/random.hpp"

namespace spincv {
namespace {

template <int N>
Eigen::Matrix<Complex, N, N> haar(Rng& rng) {
  Eigen::Matrix<Complex, N, N> z;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      z(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<Eigen::Matrix<Complex, N, N>> qr(z);
  Eigen::Matrix<Complex, N, N> q = qr.householderQ();
  const Eigen::Matrix<Complex, N, N> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int k = 0; k < N; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0);
  }
  return q;
}

}  // namespace

double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Mat4c haar_unitary(Rng& rng) { return haar<4>(rng); }
Mat2c haar_unitary_1q(Rng& rng) { return haar<2>(rng); }

}  // namespace spincv
