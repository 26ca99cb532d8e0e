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
#include <string>
#include <string_view>

#include "spincv/qcore/types.hpp"

namespace spincv {

/// One of the 16 two-qubit Pauli strings. Index = 4*first + second with
/// I=0, X=1, Y=2, Z=3; the first letter acts on qubit 1 (left tensor factor).
class PauliString {
 public:
  static constexpr int kCount = 16;

  constexpr PauliString() = default;
  explicit PauliString(int index);
  static PauliString from_label(std::string_view label);
  static PauliString from_letters(int first, int second) { return PauliString(4 * first + second); }

  int index() const { return index_; }
  int first() const { return index_ / 4; }
  int second() const { return index_ % 4; }
  bool is_identity() const { return index_ == 0; }
  std::string label() const;
  const Mat4c& matrix() const;
  bool commutes_with(PauliString other) const;

  friend bool operator==(PauliString a, PauliString b) { return a.index_ == b.index_; }

 private:
  int index_ = 0;
};

const Mat2c& single_qubit_pauli(int letter);
const std::array<Mat4c, 16>& pauli_matrices();

/// P_a P_b = phase * P_c.
struct PauliProduct {
  int index;
  Complex phase;
};
PauliProduct multiply(PauliString a, PauliString b);

Mat4c kron(const Mat2c& a, const Mat2c& b);

}  // namespace spincv
