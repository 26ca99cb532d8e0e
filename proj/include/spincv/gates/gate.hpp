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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spincv/qcore/pauli.hpp"

namespace spincv {

enum class GateKind { Idle, X1_90, X2_90, VZ1, VZ2, CZ, DCZ, DCZ_half, XEcho };

inline constexpr int kGateKindCount = 9;

/// Entangling primitive used by compilation and benchmarking.
enum class Entangler { CZ, DCZ };

struct PrimitiveGate {
  GateKind kind = GateKind::Idle;
  double angle = 0.0;     // VZ rotation angle (rad)
  double duration = 0.0;  // Idle length (s); other durations come from the device

  static PrimitiveGate idle(double seconds) { return {GateKind::Idle, 0.0, seconds}; }
  static PrimitiveGate vz1(double phi) { return {GateKind::VZ1, phi, 0.0}; }
  static PrimitiveGate vz2(double phi) { return {GateKind::VZ2, phi, 0.0}; }
  static PrimitiveGate of(GateKind kind) { return {kind, 0.0, 0.0}; }

  friend bool operator==(const PrimitiveGate&, const PrimitiveGate&) = default;
};

using Circuit = std::vector<PrimitiveGate>;

GateKind entangler_kind(Entangler e);
std::string_view entangler_name(Entangler e);
Entangler entangler_from_name(std::string_view name);

/// Virtual Z gates are frame updates; everything else is a tracked primitive.
inline bool is_virtual(GateKind k) { return k == GateKind::VZ1 || k == GateKind::VZ2; }
inline bool is_tracked(GateKind k) { return !is_virtual(k); }

std::string_view gate_kind_name(GateKind k);

/// Circuit tokens: X1, X2, Z1:<rad>, Z2:<rad>, CZ, DCZ, DCZh, XE, ID:<s>.
std::string to_token(const PrimitiveGate& g);
PrimitiveGate from_token(std::string_view token);
std::string to_string(const Circuit& c);
Circuit parse_circuit(std::string_view text);

Mat2c rx(double theta);
Mat2c rz(double phi);

/// Zero-error unitary of a gate, including bookkept frame corrections.
/// CZ is diag(1,1,1,-1); DCZ is the zero-noise unitary of its composite.
Mat4c ideal_unitary(const PrimitiveGate& g);
/// Product in time order (first gate rightmost).
Mat4c ideal_unitary(std::span<const PrimitiveGate> circuit);

/// The DCZ composite in time order: half, echo, half, frame corrections.
const Circuit& dcz_expansion();

/// Equality of unitaries modulo a global phase.
bool equal_up_to_phase(const Mat4c& a, const Mat4c& b, double tol = 1e-9);

}  // namespace spincv
