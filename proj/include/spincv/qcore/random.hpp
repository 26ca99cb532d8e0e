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

#include <cstdint>
#include <random>

#include "spincv/qcore/types.hpp"

namespace spincv {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Haar-distributed 4x4 unitary (QR of a complex Ginibre matrix with phase fix).
Mat4c haar_unitary(Rng& rng);
Mat2c haar_unitary_1q(Rng& rng);

double standard_normal(Rng& rng);
double uniform01(Rng& rng);

}  // namespace spincv
