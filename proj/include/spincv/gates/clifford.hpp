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
#include <cstdint>
#include <span>
#include <vector>

#include "spincv/gates/gate.hpp"
#include "spincv/qcore/pauli.hpp"

namespace spincv {

/// Conjugation action of a Clifford on the 16 Paulis: entry p holds the image
/// index in bits 0-3 and the sign (1 = negative) in bit 4.
using PauliMap = std::array<std::uint8_t, 16>;

/// Pauli action of a unitary. Throws ValidationError if some Pauli is not
/// mapped to a signed Pauli (non-Clifford input).
PauliMap pauli_map_from_unitary(const Mat4c& u);

/// (a after b): the map of U_a U_b.
PauliMap compose_maps(const PauliMap& a, const PauliMap& b);

/// 20-bit canonical key from the images of XI, ZI, IX, IZ.
std::uint32_t canonical_key(const PauliMap& m);

class CliffordGroup {
 public:
  /// Breadth-first closure of the generators under multiplication.
  explicit CliffordGroup(std::span<const Mat4c> generators);

  /// Group generated by X1_90, X2_90, VZ1(pi/2), VZ2(pi/2), CZ.
  static const CliffordGroup& standard();

  int size() const { return static_cast<int>(maps_.size()); }
  int identity() const { return 0; }

  const PauliMap& map(int element) const { return maps_.at(element); }
  /// A representative unitary (global phase arbitrary).
  const Mat4c& unitary(int element) const { return unitaries_.at(element); }

  /// Element of U_a U_b (b applied first).
  int product(int a, int b) const;
  int inverse(int element) const { return inverses_.at(element); }

  /// Element index of a Clifford unitary, or -1 if it is not in the table.
  int find(const Mat4c& u) const;
  int find(const PauliMap& m) const;

 private:
  std::vector<PauliMap> maps_;
  std::vector<Mat4c> unitaries_;
  std::vector<int> inverses_;
  std::vector<std::int32_t> lookup_;  // canonical key -> element
};

struct Recovery {
  int element = 0;
  /// Parity the noiseless circuit ends in from |00>: false = even, true = odd.
  bool expected_odd = false;
};

/// Element r such that r * g_n ... g_1 equals `final_pauli` (up to phase).
/// With final_pauli = II the sequence is inverted exactly; a final Pauli that
/// flips exactly one qubit makes the expected outcome odd.
Recovery recovery_gate(const CliffordGroup& group, std::span<const int> sequence,
                       PauliString final_pauli = PauliString());

}  // namespace spincv
