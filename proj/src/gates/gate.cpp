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

#include "spincv/gates/gate.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "spincv/common/errors.hpp"
#include "spincv/qcore/pauli.hpp"

namespace spincv {
namespace {

constexpr std::string_view kNames[kGateKindCount] = {"Idle", "X1_90", "X2_90", "VZ1", "VZ2",
                                                     "CZ",   "DCZ",   "DCZ_half", "XEcho"};

double parse_number(std::string_view text, std::string_view token) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ValidationError("malformed number in gate token '" + std::string(token) + "'");
  return value;
}

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Mat4c zz_rotation(double theta) {
  // exp(-i theta ZZ)
  const Complex m = std::exp(Complex(0, -theta));
  const Complex p = std::exp(Complex(0, theta));
  return Eigen::Vector4cd(m, p, p, m).asDiagonal();
}

}  // namespace

GateKind entangler_kind(Entangler e) { return e == Entangler::CZ ? GateKind::CZ : GateKind::DCZ; }

std::string_view entangler_name(Entangler e) { return e == Entangler::CZ ? "CZ" : "DCZ"; }

Entangler entangler_from_name(std::string_view name) {
  if (name == "CZ") return Entangler::CZ;
  if (name == "DCZ") return Entangler::DCZ;
  throw ValidationError("unknown entangler '" + std::string(name) + "'");
}

std::string_view gate_kind_name(GateKind k) { return kNames[static_cast<int>(k)]; }

std::string to_token(const PrimitiveGate& g) {
  switch (g.kind) {
    case GateKind::Idle: return "ID:" + format_number(g.duration);
    case GateKind::X1_90: return "X1";
    case GateKind::X2_90: return "X2";
    case GateKind::VZ1: return "Z1:" + format_number(g.angle);
    case GateKind::VZ2: return "Z2:" + format_number(g.angle);
    case GateKind::CZ: return "CZ";
    case GateKind::DCZ: return "DCZ";
    case GateKind::DCZ_half: return "DCZh";
    case GateKind::XEcho: return "XE";
  }
  throw ValidationError("unknown gate kind");
}

PrimitiveGate from_token(std::string_view token) {
  if (token == "X1") return PrimitiveGate::of(GateKind::X1_90);
  if (token == "X2") return PrimitiveGate::of(GateKind::X2_90);
  if (token == "CZ") return PrimitiveGate::of(GateKind::CZ);
  if (token == "DCZ") return PrimitiveGate::of(GateKind::DCZ);
  if (token == "DCZh") return PrimitiveGate::of(GateKind::DCZ_half);
  if (token == "XE") return PrimitiveGate::of(GateKind::XEcho);
  if (token.starts_with("Z1:")) return PrimitiveGate::vz1(parse_number(token.substr(3), token));
  if (token.starts_with("Z2:")) return PrimitiveGate::vz2(parse_number(token.substr(3), token));
  if (token.starts_with("ID:")) {
    const double t = parse_number(token.substr(3), token);
    if (t < 0.0) throw ValidationError("negative idle duration in '" + std::string(token) + "'");
    return PrimitiveGate::idle(t);
  }
  throw ValidationError("unknown gate token '" + std::string(token) + "'");
}

std::string to_string(const Circuit& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ' ';
    out += to_token(c[i]);
  }
  return out;
}

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) c.push_back(from_token(tok));
  return c;
}

Mat2c rx(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat2c r;
  r << c, Complex(0, -s), Complex(0, -s), c;
  return r;
}

Mat2c rz(double phi) {
  Mat2c r = Mat2c::Zero();
  r(0, 0) = std::exp(Complex(0, -phi / 2));
  r(1, 1) = std::exp(Complex(0, phi / 2));
  return r;
}

const Circuit& dcz_expansion() {
  static const Circuit c = {PrimitiveGate::of(GateKind::DCZ_half), PrimitiveGate::of(GateKind::XEcho),
                            PrimitiveGate::of(GateKind::DCZ_half), PrimitiveGate::vz1(kPi / 2),
                            PrimitiveGate::vz2(kPi / 2)};
  return c;
}

Mat4c ideal_unitary(const PrimitiveGate& g) {
  const Mat2c id = Mat2c::Identity();
  switch (g.kind) {
    case GateKind::Idle: return Mat4c::Identity();
    case GateKind::X1_90: return kron(rx(kPi / 2), id);
    case GateKind::X2_90: return kron(id, rx(kPi / 2));
    case GateKind::VZ1: return kron(rz(g.angle), id);
    case GateKind::VZ2: return kron(id, rz(g.angle));
    case GateKind::CZ: {
      Mat4c u = Mat4c::Identity();
      u(3, 3) = -1.0;
      return u;
    }
    case GateKind::DCZ_half: return zz_rotation(kPi / 8);
    case GateKind::XEcho: return kron(rx(kPi), rx(kPi));
    case GateKind::DCZ: return ideal_unitary(dcz_expansion());
  }
  throw ValidationError("unknown gate kind");
}

Mat4c ideal_unitary(std::span<const PrimitiveGate> circuit) {
  Mat4c u = Mat4c::Identity();
  for (const auto& g : circuit) u = ideal_unitary(g) * u;
  return u;
}

bool equal_up_to_phase(const Mat4c& a, const Mat4c& b, double tol) {
  const Complex overlap = (a.adjoint() * b).trace();
  if (std::abs(overlap) < 1e-6) return false;
  const Complex phase = overlap / std::abs(overlap);
  return (a * phase - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace spincv
