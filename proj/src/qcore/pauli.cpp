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

#include "spincv/qcore/pauli.hpp"

#include "spincv/common/errors.hpp"

namespace spincv {
namespace {

constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};

std::array<Mat2c, 4> make_single() {
  const Complex i(0.0, 1.0);
  std::array<Mat2c, 4> p;
  p[0] << 1, 0, 0, 1;
  p[1] << 0, 1, 1, 0;
  p[2] << 0, -i, i, 0;
  p[3] << 1, 0, 0, -1;
  return p;
}

// Single-qubit multiplication table: s_a s_b = phase * s_c.
PauliProduct multiply_single(int a, int b) {
  if (a == 0) return {b, 1.0};
  if (b == 0) return {a, 1.0};
  if (a == b) return {0, 1.0};
  const int c = 6 - a - b;  // the remaining letter among X, Y, Z
  // cyclic X->Y->Z gives +i
  const bool cyclic = (b - a + 3) % 3 == 1;
  return {c, cyclic ? Complex(0, 1) : Complex(0, -1)};
}

}  // namespace

PauliString::PauliString(int index) : index_(index) {
  if (index < 0 || index >= kCount) throw ValidationError("Pauli index out of range");
}

PauliString PauliString::from_label(std::string_view label) {
  if (label.size() != 2) throw ValidationError("Pauli label must have two letters");
  int letters[2];
  for (int k = 0; k < 2; ++k) {
    letters[k] = -1;
    for (int l = 0; l < 4; ++l)
      if (label[k] == kLetters[l]) letters[k] = l;
    if (letters[k] < 0) throw ValidationError("invalid Pauli letter in '" + std::string(label) + "'");
  }
  return from_letters(letters[0], letters[1]);
}

std::string PauliString::label() const { return {kLetters[first()], kLetters[second()]}; }

const Mat4c& PauliString::matrix() const { return pauli_matrices()[index_]; }

bool PauliString::commutes_with(PauliString other) const {
  int anti = 0;
  if (first() != 0 && other.first() != 0 && first() != other.first()) ++anti;
  if (second() != 0 && other.second() != 0 && second() != other.second()) ++anti;
  return anti % 2 == 0;
}

const Mat2c& single_qubit_pauli(int letter) {
  static const std::array<Mat2c, 4> table = make_single();
  return table.at(letter);
}

Mat4c kron(const Mat2c& a, const Mat2c& b) {
  Mat4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

const std::array<Mat4c, 16>& pauli_matrices() {
  static const std::array<Mat4c, 16> table = [] {
    std::array<Mat4c, 16> t;
    for (int k = 0; k < 16; ++k) t[k] = kron(single_qubit_pauli(k / 4), single_qubit_pauli(k % 4));
    return t;
  }();
  return table;
}

PauliProduct multiply(PauliString a, PauliString b) {
  const PauliProduct p1 = multiply_single(a.first(), b.first());
  const PauliProduct p2 = multiply_single(a.second(), b.second());
  return {4 * p1.index + p2.index, p1.phase * p2.phase};
}

}  // namespace spincv
