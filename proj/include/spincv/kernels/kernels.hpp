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

// Dense real-arithmetic kernels behind the channel algebra, the tomography
// likelihoods and the Bayesian covariance updates. Each entry point has a
// scalar reference implementation and, where the target supports it, an
// AVX2/FMA (x86-64) or NEON (aarch64) variant selected once at runtime.
// All matrices are row-major with an explicit leading dimension.

#include <cstddef>
#include <string_view>

namespace spincv::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x, A is rows x cols
  void (*gemv)(const double* a, std::size_t lda, const double* x, double* y, std::size_t rows,
               std::size_t cols);
  // y = x^T A (row vector times matrix), A is rows x cols
  void (*gemv_t)(const double* a, std::size_t lda, const double* x, double* y, std::size_t rows,
                 std::size_t cols);
  // C = A B, A is m x k, B is k x n
  void (*gemm)(const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
               std::size_t ldc, std::size_t m, std::size_t k, std::size_t n);
  // A += alpha x y^T, A is rows x cols
  void (*ger)(double alpha, const double* x, const double* y, double* a, std::size_t lda,
              std::size_t rows, std::size_t cols);
};

const KernelTable& scalar_kernels();

// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Best table for this CPU, resolved on first use.
const KernelTable& active();

// Overrides the active table (tests and benchmarks). Returns false when the
// requested ISA is unavailable, leaving the selection unchanged.
bool select(Isa isa);

}  // namespace spincv::kernels
