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

#include <doctest.h>

#include <random>
#include <vector>

#include "spincv/kernels/kernels.hpp"

using namespace spincv::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<const KernelTable*> variants() {
  std::vector<const KernelTable*> out;
  if (const auto* t = avx2_kernels()) out.push_back(t);
  if (const auto* t = neon_kernels()) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("scalar dot and axpy against hand values") {
  const auto& s = scalar_kernels();
  const double x[] = {1, 2, 3};
  double y[] = {4, 5, 6};
  CHECK(s.dot(x, y, 3) == 32.0);
  s.axpy(2.0, x, y, 3);
  CHECK(y[0] == 6.0);
  CHECK(y[2] == 12.0);
}

TEST_CASE("scalar gemm on a 2x3 by 3x2 product") {
  const double a[] = {1, 2, 3, 4, 5, 6};
  const double b[] = {7, 8, 9, 10, 11, 12};
  double c[4];
  scalar_kernels().gemm(a, 3, b, 2, c, 2, 2, 3, 2);
  CHECK(c[0] == 58.0);
  CHECK(c[1] == 64.0);
  CHECK(c[2] == 139.0);
  CHECK(c[3] == 154.0);
}

TEST_CASE("SIMD variants match the scalar reference") {
  std::mt19937_64 rng(7);
  const auto& ref = scalar_kernels();
  for (const KernelTable* simd : variants()) {
    CAPTURE(isa_name(simd->isa));
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 33u, 256u, 257u}) {
      const auto x = random_vec(rng, n);
      const auto y = random_vec(rng, n);
      CHECK(simd->dot(x.data(), y.data(), n) == doctest::Approx(ref.dot(x.data(), y.data(), n)).epsilon(1e-13));

      auto y1 = y, y2 = y;
      ref.axpy(0.37, x.data(), y1.data(), n);
      simd->axpy(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-14));
    }
    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 5}, {16, 16}, {17, 9}, {5, 33}}) {
      const std::size_t lda = cols + 2;
      const auto a = random_vec(rng, rows * lda);
      const auto xc = random_vec(rng, cols);
      const auto xr = random_vec(rng, rows);
      std::vector<double> r1(rows), r2(rows), c1(cols), c2(cols);
      ref.gemv(a.data(), lda, xc.data(), r1.data(), rows, cols);
      simd->gemv(a.data(), lda, xc.data(), r2.data(), rows, cols);
      for (std::size_t i = 0; i < rows; ++i) CHECK(r2[i] == doctest::Approx(r1[i]).epsilon(1e-13));
      ref.gemv_t(a.data(), lda, xr.data(), c1.data(), rows, cols);
      simd->gemv_t(a.data(), lda, xr.data(), c2.data(), rows, cols);
      for (std::size_t j = 0; j < cols; ++j) CHECK(c2[j] == doctest::Approx(c1[j]).epsilon(1e-13));

      auto g1 = a, g2 = a;
      ref.ger(-0.8, xr.data(), xc.data(), g1.data(), lda, rows, cols);
      simd->ger(-0.8, xr.data(), xc.data(), g2.data(), lda, rows, cols);
      for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == doctest::Approx(g1[i]).epsilon(1e-14));
    }
    const std::size_t shapes[][3] = {{16, 16, 16}, {3, 7, 5}, {9, 4, 13}, {1, 1, 1}};
    for (const auto& shape : shapes) {
      const std::size_t m = shape[0], k = shape[1], n = shape[2];
      const auto a = random_vec(rng, m * k);
      const auto b = random_vec(rng, k * n);
      std::vector<double> c1(m * n), c2(m * n);
      ref.gemm(a.data(), k, b.data(), n, c1.data(), n, m, k, n);
      simd->gemm(a.data(), k, b.data(), n, c2.data(), n, m, k, n);
      for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c2[i] == doctest::Approx(c1[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("select switches and restores the active table") {
  const Isa original = active().isa;
  CHECK(select(Isa::Scalar));
  CHECK(active().isa == Isa::Scalar);
  CHECK(select(original));
  CHECK(active().isa == original);
}
