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

#include "spincv/device/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "spincv/common/errors.hpp"
#include "spincv/common/seed.hpp"

namespace spincv {
namespace {

const Mat4c& pauli(const char* label) { return PauliString::from_label(label).matrix(); }

// exp(-i 2 pi H T) for Hermitian H in Hz.
Mat4c propagate(const Mat4c& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat4c> es(h);
  Vec4c phases;
  for (int k = 0; k < 4; ++k) phases(k) = std::exp(Complex(0, -kTwoPi * es.eigenvalues()(k) * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Mat4c diagonal_propagator(double d1, double d2, double j, double t) {
  Mat4c u = Mat4c::Zero();
  for (int b = 0; b < 4; ++b) {
    const double z1 = (b & 2) ? -1.0 : 1.0;
    const double z2 = (b & 1) ? -1.0 : 1.0;
    const double e = 0.5 * d1 * z1 + 0.5 * d2 * z2 + 0.25 * j * (z1 * z2 - 1.0);
    u(b, b) = std::exp(Complex(0, -kTwoPi * e * t));
  }
  return u;
}

Mat4c z_frame(double f1, double f2, double t) {
  // exp(+i 2 pi t (f1 ZI + f2 IZ) / 2)
  return diagonal_propagator(-f1, -f2, 0.0, t);
}

struct GateSetting {
  double d1 = 0.0, d2 = 0.0;
  double j_idle = 0.0;
  double j_pulse = 0.0;
  double stark = 0.0;
};

GateSetting settings(const DeviceParameters& p, const ContextState& c, const NoiseRealization& n,
                     const SimulationOptions& o) {
  NoiseRealization eff = n;
  if (!o.exchange_noise) eff.j_factor = 1.0;
  GateSetting s;
  s.d1 = frame_detuning(p, c, eff, 0);
  s.d2 = frame_detuning(p, c, eff, 1);
  s.j_idle = p.j_off * eff.j_factor;
  s.j_pulse = p.j_on() * (1.0 + p.drift.exchange_drift_rate * c.lab_time) * eff.j_factor;
  s.stark = p.stark_coeff * p.v_on;
  return s;
}

Mat4c cz_corrections() { return kron(rz(-kPi / 2), rz(-kPi / 2)); }

double drive_offset(const ContextState& c, int driven) {
  // Spectator frame minus tone frequency.
  return driven == 0 ? c.frame_freqs[1] - c.frame_freqs[0] : c.frame_freqs[0] - c.frame_freqs[1];
}

void finish(PrimitiveResult& r, const DeviceParameters& p, const SimulationOptions& o) {
  if (o.markovian_dephasing) r.dephasing_rate = {1.0 / p.t2hahn1, 1.0 / p.t2hahn2};
}

}  // namespace

std::array<double, 2> PrimitiveResult::coherence() const {
  return {std::exp(-dephasing_rate[0] * duration), std::exp(-dephasing_rate[1] * duration)};
}

PauliTransferMatrix PrimitiveResult::ptm() const {
  const auto c = coherence();
  return ptm_from_unitary(unitary).then(phase_damping(c[0], c[1]));
}

PrimitiveResult simulate_primitive(const DeviceParameters& p, const ContextState& c, const NoiseRealization& n,
                                   const PrimitiveGate& gate, const SimulationOptions& o) {
  const GateSetting s = settings(p, c, n, o);
  PrimitiveResult r;
  switch (gate.kind) {
    case GateKind::VZ1:
    case GateKind::VZ2:
      r.unitary = ideal_unitary(gate);
      return r;
    case GateKind::Idle:
      r.duration = gate.duration;
      r.unitary = diagonal_propagator(s.d1, s.d2, s.j_idle, r.duration);
      break;
    case GateKind::CZ:
      r.duration = p.cz_duration();
      r.unitary = cz_corrections() * diagonal_propagator(s.d1 + s.stark, s.d2 + s.stark, s.j_pulse, r.duration);
      break;
    case GateKind::DCZ_half:
      r.duration = p.dcz_half_duration();
      r.unitary = diagonal_propagator(s.d1 + s.stark, s.d2 + s.stark, s.j_pulse, r.duration);
      break;
    case GateKind::X1_90:
    case GateKind::X2_90: {
      const int q = gate.kind == GateKind::X1_90 ? 0 : 1;
      const double rabi = q == 0 ? p.rabi1 : p.rabi2;
      const double offset = drive_offset(c, q);
      r.duration = p.x90_duration(q);
      r.mw_time = r.duration;
      // Tone frame for both qubits: driven qubit resonant, spectator detuned by `offset`.
      const double dq = q == 0 ? s.d1 : s.d2;
      const double ds = (q == 0 ? s.d2 : s.d1) + offset;
      const char* zq = q == 0 ? "ZI" : "IZ";
      const char* zs = q == 0 ? "IZ" : "ZI";
      const char* xq = q == 0 ? "XI" : "IX";
      const char* xs = q == 0 ? "IX" : "XI";
      Mat4c h = 0.5 * dq * pauli(zq) + 0.5 * rabi * pauli(xq) + 0.5 * ds * pauli(zs) +
                0.25 * s.j_idle * (pauli("ZZ") - Mat4c::Identity());
      if (o.crosstalk) h += 0.5 * rabi * pauli(xs);
      const Mat4c back = q == 0 ? z_frame(0.0, offset, r.duration) : z_frame(offset, 0.0, r.duration);
      r.unitary = back * propagate(h, r.duration);
      break;
    }
    case GateKind::XEcho: {
      r.duration = p.echo_duration();
      r.mw_time = r.duration;
      const double omega = 0.5 / r.duration;
      double s1 = 0.0, s2 = 0.0;
      if (o.crosstalk) {
        const double split = c.frame_freqs[0] - c.frame_freqs[1];
        s1 = omega * omega / (2.0 * split);
        s2 = -s1;
      }
      const Mat4c h = 0.5 * (s.d1 + s1) * pauli("ZI") + 0.5 * (s.d2 + s2) * pauli("IZ") +
                      0.5 * omega * (pauli("XI") + pauli("IX")) +
                      0.25 * s.j_idle * (pauli("ZZ") - Mat4c::Identity());
      r.unitary = propagate(h, r.duration);
      break;
    }
    case GateKind::DCZ:
      throw ValidationError("simulate_primitive: DCZ is a composite; expand it into primitives");
  }
  finish(r, p, o);
  return r;
}

PrimitiveResult simulate_primitive_stepped(const DeviceParameters& p, const ContextState& c,
                                           const NoiseRealization& n, const PrimitiveGate& gate,
                                           const SimulationOptions& o, long max_steps) {
  if (is_virtual(gate.kind) || gate.kind == GateKind::DCZ) return simulate_primitive(p, c, n, gate, o);
  const GateSetting s = settings(p, c, n, o);
  PrimitiveResult r;
  // Time-dependent Hamiltonian in each qubit's own frame; terms are listed as
  // (coefficient function, Pauli).
  double max_freq = std::max({std::abs(s.d1), std::abs(s.d2), s.j_pulse, p.rabi1, p.rabi2, 1.0});
  std::function<Mat4c(double)> hamiltonian;
  const Mat4c zz = 0.25 * (pauli("ZZ") - Mat4c::Identity());
  switch (gate.kind) {
    case GateKind::Idle:
      r.duration = gate.duration;
      hamiltonian = [&](double) -> Mat4c { return 0.5 * s.d1 * pauli("ZI") + 0.5 * s.d2 * pauli("IZ") + s.j_idle * zz; };
      break;
    case GateKind::CZ:
    case GateKind::DCZ_half:
      r.duration = gate.kind == GateKind::CZ ? p.cz_duration() : p.dcz_half_duration();
      hamiltonian = [&](double) -> Mat4c {
        return 0.5 * (s.d1 + s.stark) * pauli("ZI") + 0.5 * (s.d2 + s.stark) * pauli("IZ") + s.j_pulse * zz;
      };
      break;
    case GateKind::X1_90:
    case GateKind::X2_90: {
      const int q = gate.kind == GateKind::X1_90 ? 0 : 1;
      const double rabi = q == 0 ? p.rabi1 : p.rabi2;
      const double offset = drive_offset(c, q);
      max_freq = std::max(max_freq, std::abs(offset));
      r.duration = p.x90_duration(q);
      r.mw_time = r.duration;
      const char* xq = q == 0 ? "XI" : "IX";
      const char* xs = q == 0 ? "IX" : "XI";
      const char* ys = q == 0 ? "IY" : "YI";
      const bool xt = o.crosstalk;
      hamiltonian = [&, rabi, offset, xq, xs, ys, xt](double t) -> Mat4c {
        Mat4c h = 0.5 * s.d1 * pauli("ZI") + 0.5 * s.d2 * pauli("IZ") + 0.5 * rabi * pauli(xq) + s.j_idle * zz;
        if (xt) {
          const double th = kTwoPi * offset * t;
          h += 0.5 * rabi * (std::cos(th) * pauli(xs) - std::sin(th) * pauli(ys));
        }
        return h;
      };
      break;
    }
    case GateKind::XEcho: {
      r.duration = p.echo_duration();
      r.mw_time = r.duration;
      const double omega = 0.5 / r.duration;
      const double split = c.frame_freqs[0] - c.frame_freqs[1];
      max_freq = std::max(max_freq, std::abs(split));
      const bool xt = o.crosstalk;
      hamiltonian = [&, omega, split, xt](double t) -> Mat4c {
        Mat4c h = 0.5 * s.d1 * pauli("ZI") + 0.5 * s.d2 * pauli("IZ") +
                  0.5 * omega * (pauli("XI") + pauli("IX")) + s.j_idle * zz;
        if (xt) {
          // Qubit 1 sees tone 2 at +split, qubit 2 sees tone 1 at -split.
          const double th = kTwoPi * split * t;
          h += 0.5 * omega * (std::cos(th) * pauli("XI") - std::sin(th) * pauli("YI"));
          h += 0.5 * omega * (std::cos(th) * pauli("IX") + std::sin(th) * pauli("IY"));
        }
        return h;
      };
      break;
    }
    default:
      break;
  }
  const double dt_max = 1.0 / (50.0 * max_freq);
  const double steps_real = std::ceil(r.duration / dt_max);
  if (steps_real > static_cast<double>(max_steps))
    throw ValidationError("simulate_primitive_stepped: step-size underflow (" + std::to_string(steps_real) +
                          " steps required)");
  const long steps = std::max(1L, static_cast<long>(steps_real));
  const double dt = r.duration / static_cast<double>(steps);
  Mat4c u = Mat4c::Identity();
  for (long k = 0; k < steps; ++k) u = propagate(hamiltonian((static_cast<double>(k) + 0.5) * dt), dt) * u;
  if (gate.kind == GateKind::CZ) u = cz_corrections() * u;
  r.unitary = u;
  finish(r, p, o);
  return r;
}

Circuit expand_composites(const Circuit& circuit) {
  Circuit out;
  out.reserve(circuit.size());
  for (const auto& g : circuit) {
    if (g.kind == GateKind::DCZ) {
      const auto& e = dcz_expansion();
      out.insert(out.end(), e.begin(), e.end());
    } else {
      out.push_back(g);
    }
  }
  return out;
}

namespace {

double gate_duration(const DeviceParameters& p, const PrimitiveGate& g) {
  switch (g.kind) {
    case GateKind::Idle: return g.duration;
    case GateKind::X1_90: return p.x90_duration(0);
    case GateKind::X2_90: return p.x90_duration(1);
    case GateKind::CZ: return p.cz_duration();
    case GateKind::DCZ_half: return p.dcz_half_duration();
    case GateKind::XEcho: return p.echo_duration();
    case GateKind::DCZ: return 2.0 * p.dcz_half_duration() + p.echo_duration();
    default: return 0.0;
  }
}

bool is_microwave(GateKind k) { return k == GateKind::X1_90 || k == GateKind::X2_90 || k == GateKind::XEcho; }

void apply_dephasing(Mat4c& rho, const std::array<double, 2>& c) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double f = 1.0;
      if ((i ^ j) & 2) f *= c[0];
      if ((i ^ j) & 1) f *= c[1];
      rho(i, j) *= f;
    }
}

struct GateCache {
  std::vector<std::pair<PrimitiveGate, PrimitiveResult>> entries;
  const PrimitiveResult* find(const PrimitiveGate& g) const {
    for (const auto& [k, v] : entries)
      if (k == g) return &v;
    return nullptr;
  }
};

bool context_static(const DeviceParameters& p) {
  return p.drift.heating_amplitude1 == 0.0 && p.drift.heating_amplitude2 == 0.0;
}

Mat4c evolve_impl(const DeviceParameters& p, const Circuit& expanded, const NoiseRealization& n,
                  const ContextState& context, const SimulationOptions& o, Mat4c rho) {
  ContextState ctx = context;
  GateCache cache;
  const bool cacheable = context_static(p);
  for (const auto& g : expanded) {
    if (is_virtual(g.kind)) {
      const Mat4c u = ideal_unitary(g);
      rho = u * rho * u.adjoint();
      continue;
    }
    PrimitiveResult local;
    const PrimitiveResult* r = cacheable ? cache.find(g) : nullptr;
    if (!r) {
      local = simulate_primitive(p, ctx, n, g, o);
      if (cacheable) {
        cache.entries.emplace_back(g, local);
        r = &cache.entries.back().second;
      } else {
        r = &local;
      }
    }
    rho = r->unitary * rho * r->unitary.adjoint();
    apply_dephasing(rho, r->coherence());
    ctx.mw_on_time += r->mw_time;
  }
  return rho;
}

}  // namespace

double circuit_duration(const DeviceParameters& params, const Circuit& circuit) {
  double t = 0.0;
  for (const auto& g : circuit) t += gate_duration(params, g);
  return t;
}

double circuit_mw_time(const DeviceParameters& params, const Circuit& circuit) {
  double t = 0.0;
  for (const auto& g : expand_composites(circuit))
    if (is_microwave(g.kind)) t += gate_duration(params, g);
  return t;
}

Mat4c evolve_density(const DeviceParameters& params, const Circuit& circuit, const NoiseRealization& noise,
                     const ContextState& context, const SimulationOptions& options, const Mat4c& rho0) {
  return evolve_impl(params, expand_composites(circuit), noise, context, options, rho0);
}

MeasurementRecord run_circuit(const DeviceParameters& params, const Circuit& circuit, int shots, std::uint64_t seed,
                              ContextState& context, const SimulationOptions& options) {
  if (shots < 1) throw ValidationError("run_circuit: shots must be >= 1");
  const Circuit expanded = expand_composites(circuit);
  const double duration = circuit_duration(params, expanded);
  const double mw = circuit_mw_time(params, expanded);
  const Mat4c rho0 = initial_state(params.spam).matrix();

  MeasurementRecord rec;
  rec.circuit = circuit;
  rec.shots = shots;
  rec.lab_time = context.lab_time;
  for (int shot = 0; shot < shots; ++shot) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(shot)));
    NoiseRealization noise = sample_noise_realization(params, context, rng);
    if (!options.quasistatic_noise) {
      noise.delta1 = context.walk_offsets[0];
      noise.delta2 = context.walk_offsets[1];
    }
    const Mat4c rho = evolve_impl(params, expanded, noise, context, options, rho0);
    const double p_even = parity_probabilities(rho, params.spam).p_even;
    if (uniform01(rng) < p_even)
      ++rec.even_count;
    else
      ++rec.odd_count;
    context = advance_context(context, params, mw, duration + params.readout_time, rng);
  }
  return rec;
}

std::vector<std::pair<double, double>> gauss_hermite(int n) {
  if (n < 1) throw ValidationError("gauss_hermite: need at least one node");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite polynomials.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  std::vector<std::pair<double, double>> out(n);
  for (int k = 0; k < n; ++k) {
    const double v = es.eigenvectors()(0, k);
    out[k] = {es.eigenvalues()(k), v * v};
  }
  return out;
}

std::vector<QuadratureNode> noise_quadrature(const DeviceParameters& params, const ContextState& context,
                                             const SimulationOptions& options, int nodes_per_dimension) {
  const std::vector<std::pair<double, double>> single{{0.0, 1.0}};
  const auto rule = gauss_hermite(nodes_per_dimension);
  const bool qs = options.quasistatic_noise;
  const auto& r1 = qs ? rule : single;
  const auto& r2 = qs ? rule : single;
  const auto& rj = options.exchange_noise && params.j_sigma > 0.0 ? rule : single;
  const double s1 = quasistatic_sigma(params.t2star1), s2 = quasistatic_sigma(params.t2star2);
  const double sj = std::log1p(params.j_sigma);
  std::vector<QuadratureNode> nodes;
  nodes.reserve(r1.size() * r2.size() * rj.size());
  for (const auto& [x1, w1] : r1)
    for (const auto& [x2, w2] : r2)
      for (const auto& [xj, wj] : rj) {
        QuadratureNode node;
        node.noise.delta1 = context.walk_offsets[0] + s1 * x1;
        node.noise.delta2 = context.walk_offsets[1] + s2 * x2;
        node.noise.j_factor = std::exp(sj * xj);
        node.weight = w1 * w2 * wj;
        nodes.push_back(node);
      }
  return nodes;
}

double expected_even_probability(const DeviceParameters& params, const Circuit& circuit, const ContextState& context,
                                 const SimulationOptions& options, int nodes_per_dimension) {
  const Circuit expanded = expand_composites(circuit);
  const Mat4c rho0 = initial_state(params.spam).matrix();
  double p = 0.0;
  for (const auto& node : noise_quadrature(params, context, options, nodes_per_dimension)) {
    const Mat4c rho = evolve_impl(params, expanded, node.noise, context, options, rho0);
    p += node.weight * parity_probabilities(rho, params.spam).p_even;
  }
  return p;
}

PauliTransferMatrix average_channel(const DeviceParameters& params, const Circuit& circuit,
                                    const ContextState& context, const SimulationOptions& options,
                                    int nodes_per_dimension) {
  const Circuit expanded = expand_composites(circuit);
  Mat16 avg = Mat16::Zero();
  for (const auto& node : noise_quadrature(params, context, options, nodes_per_dimension)) {
    ContextState ctx = context;
    PauliTransferMatrix m;
    for (const auto& g : expanded) {
      const PrimitiveResult r = simulate_primitive(params, ctx, node.noise, g, options);
      m = m.then(r.ptm());
      ctx.mw_on_time += r.mw_time;
    }
    avg += node.weight * m.matrix();
  }
  return PauliTransferMatrix(avg);
}

}  // namespace spincv
