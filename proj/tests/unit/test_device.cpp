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

#include <cmath>
#include <limits>

#include "spincv/common/errors.hpp"
#include "spincv/common/seed.hpp"
#include "spincv/device/config.hpp"
#include "spincv/device/feedback.hpp"
#include "spincv/device/simulator.hpp"

using namespace spincv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Calibrated, noise-free device: J_on = 1 MHz with a vanishing residual exchange.
DeviceParameters quiet_device() {
  DeviceParameters p = device_preset("C");
  p.j_off = 1e-6;
  p.j_slope = 30.0;
  p.stark_coeff = 0.0;
  p.t2star1 = p.t2star2 = kInf;
  p.t2hahn1 = p.t2hahn2 = kInf;
  p.j_sigma = 0.0;
  p.spam = {};
  return p;
}

SimulationOptions no_noise() {
  SimulationOptions o;
  o.crosstalk = false;
  o.quasistatic_noise = false;
  o.markovian_dephasing = false;
  o.exchange_noise = false;
  return o;
}

Mat4c density(const Vec4c& psi) { return psi * psi.adjoint(); }

}  // namespace

TEST_CASE("exchange_from_voltage examples") {
  DeviceParameters p = device_preset("A");
  p.j_slope = 10.0;
  CHECK(exchange_from_voltage(p, 0.0) == doctest::Approx(p.j_off));
  CHECK(exchange_from_voltage(p, 0.4) == doctest::Approx(1e4 * p.j_off));
  CHECK(exchange_from_voltage(p, 0.2) == doctest::Approx(1e2 * p.j_off));
  CHECK(exchange_from_voltage(p, 0.3) > exchange_from_voltage(p, 0.29));
  CHECK_THROWS_AS(exchange_from_voltage(p, 0.41), ValidationError);
  CHECK_THROWS_AS(exchange_from_voltage(p, -0.01), ValidationError);
}

TEST_CASE("presets satisfy the parameter invariants") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    CHECK(device_preset(name).validation_errors().empty());
  }
  DeviceParameters bad = device_preset("A");
  bad.t2hahn1 = 1e-6;
  bad.spam.init_error = 1.5;
  bad.rabi2 = -1.0;
  CHECK(bad.validation_errors().size() == 3);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("noise realizations") {
  DeviceParameters p = quiet_device();
  ContextState ctx = ContextState::initial(p);
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const auto n = sample_noise_realization(p, ctx, rng);
    CHECK(n.delta1 == 0.0);
    CHECK(n.delta2 == 0.0);
    CHECK(n.j_factor == 1.0);
  }
  // Gaussian-average oracle: <cos(2 pi delta T2*)> = exp(-1).
  p.t2star1 = 10e-6;
  const int samples = 100000;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) sum += std::cos(kTwoPi * sample_noise_realization(p, ctx, rng).delta1 * p.t2star1);
  CHECK(sum / samples == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
}

TEST_CASE("zero-noise primitives reproduce their ideal unitaries") {
  const DeviceParameters p = quiet_device();
  const ContextState ctx = ContextState::initial(p);
  const NoiseRealization n;
  for (GateKind k : {GateKind::Idle, GateKind::X1_90, GateKind::X2_90, GateKind::VZ1, GateKind::VZ2, GateKind::CZ,
                     GateKind::DCZ_half, GateKind::XEcho}) {
    CAPTURE(gate_kind_name(k));
    const PrimitiveGate g{k, 0.7, 3e-6};
    const auto r = simulate_primitive(p, ctx, n, g, no_noise());
    CHECK(equal_up_to_phase(r.unitary, ideal_unitary(g), 1e-9));
  }
  const Circuit dcz{PrimitiveGate::of(GateKind::DCZ)};
  const auto m = average_channel(p, dcz, ctx, no_noise());
  CHECK((m.matrix() - ptm_from_unitary(ideal_unitary(PrimitiveGate::of(GateKind::DCZ))).matrix()).cwiseAbs().maxCoeff() <
        1e-9);
  CHECK_THROWS_AS(simulate_primitive(p, ctx, n, PrimitiveGate::of(GateKind::DCZ)), ValidationError);
}

TEST_CASE("spectator AC Stark angle matches second-order perturbation theory") {
  DeviceParameters p = quiet_device();
  p.rabi1 = 0.5e6;
  for (double ratio : {50.0, 80.0, 200.0}) {
    p.f2 = p.f1 - ratio * p.rabi1;
    const ContextState ctx = ContextState::initial(p);
    SimulationOptions o = no_noise();
    o.crosstalk = true;
    const auto r = simulate_primitive(p, ctx, NoiseRealization{}, PrimitiveGate::of(GateKind::X1_90), o);
    const Mat4c rest = r.unitary * ideal_unitary(PrimitiveGate::of(GateKind::X1_90)).adjoint();
    const double angle = std::arg(rest(1, 1) / rest(0, 0));
    const double oracle = kTwoPi * p.rabi1 * p.rabi1 / (2.0 * p.delta_ez()) * p.x90_duration(0);
    CAPTURE(ratio);
    CHECK(std::abs(angle) == doctest::Approx(oracle).epsilon(0.05));
  }
}

TEST_CASE("idle phase under a quasistatic detuning is exact") {
  const DeviceParameters p = quiet_device();
  const ContextState ctx = ContextState::initial(p);
  NoiseRealization n;
  n.delta1 = 12.5e3;
  const double tau = 3.3e-6;
  const auto r = simulate_primitive(p, ctx, n, PrimitiveGate::idle(tau), no_noise());
  const double phase = std::arg(r.unitary(2, 2) / r.unitary(0, 0));
  CHECK(phase == doctest::Approx(std::remainder(kTwoPi * n.delta1 * tau, kTwoPi)).epsilon(1e-9));
}

TEST_CASE("stepped integrator agrees with the closed-form propagators") {
  DeviceParameters p = device_preset("A");
  const ContextState ctx = ContextState::initial(p);
  NoiseRealization n{30e3, -20e3, 1.01};
  for (GateKind k : {GateKind::Idle, GateKind::CZ, GateKind::DCZ_half}) {
    const PrimitiveGate g{k, 0.0, 1e-6};
    const auto a = simulate_primitive(p, ctx, n, g);
    const auto b = simulate_primitive_stepped(p, ctx, n, g);
    CHECK((a.unitary - b.unitary).cwiseAbs().maxCoeff() < 1e-10);
  }
  for (GateKind k : {GateKind::X1_90, GateKind::X2_90, GateKind::XEcho}) {
    CAPTURE(gate_kind_name(k));
    const auto a = simulate_primitive(p, ctx, n, PrimitiveGate::of(k));
    const auto b = simulate_primitive_stepped(p, ctx, n, PrimitiveGate::of(k));
    const double overlap = std::norm((a.unitary.adjoint() * b.unitary).trace()) / 16.0;
    CHECK(overlap > 0.999);
  }
  DeviceParameters absurd = p;
  absurd.f1 = 1e17;
  CHECK_THROWS_AS(simulate_primitive_stepped(absurd, ContextState::initial(absurd), n,
                                             PrimitiveGate::of(GateKind::X2_90), {}, 1000),
                  ValidationError);
}

TEST_CASE("DCZ echo removes the dependence on quasistatic detunings") {
  DeviceParameters p = device_preset("A");
  p.j_sigma = 0.0;
  const ContextState ctx = ContextState::initial(p);
  const Mat4c echo = ideal_unitary(PrimitiveGate::of(GateKind::XEcho));
  auto composite = [&](double d1, double d2) {
    const NoiseRealization n{d1, d2, 1.0};
    const Mat4c half = simulate_primitive(p, ctx, n, PrimitiveGate::of(GateKind::DCZ_half)).unitary;
    return Mat4c(half * echo * half);
  };
  const Mat4c reference = composite(0.0, 0.0);
  for (auto [d1, d2] : {std::pair{50e3, -30e3}, std::pair{-120e3, 7e3}, std::pair{1e3, 1e3}}) {
    CHECK(equal_up_to_phase(composite(d1, d2), reference, 1e-12));
  }
}

TEST_CASE("parity readout POVM") {
  const SpamParameters ideal{};
  Vec4c psi = Vec4c::Zero();
  psi(0) = 1.0;
  CHECK(parity_probabilities(density(psi), ideal).p_even == doctest::Approx(1.0));
  psi(1) = 1.0;
  psi /= psi.norm();
  CHECK(parity_probabilities(density(psi), ideal).p_even == doctest::Approx(0.5));
  Vec4c odd = Vec4c::Zero();
  odd(1) = 1.0;
  CHECK(parity_probabilities(density(odd), SpamParameters{0.0, 0.0, 0.02}).p_even == doctest::Approx(0.02));

  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Mat4c u = haar_unitary(rng);
    const Mat4c rho = u * density(Vec4c::Unit(0)) * u.adjoint();
    for (const SpamParameters s : {SpamParameters{}, SpamParameters{0.0, 0.03, 0.07}}) {
      const auto pr = parity_probabilities(rho, s);
      CHECK(std::abs(pr.p_even + pr.p_odd - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("run_circuit basics and determinism") {
  const DeviceParameters quiet = quiet_device();
  ContextState ctx = ContextState::initial(quiet);
  const auto empty = run_circuit(quiet, {}, 100, 5, ctx);
  CHECK(empty.even_count == 100);

  const DeviceParameters a = device_preset("drift-demo");
  const Circuit c = parse_circuit("X1 X2 DCZ Z1:0.3 X1 ID:1e-6 CZ XE");
  ContextState c1 = ContextState::initial(a), c2 = ContextState::initial(a);
  const auto r1 = run_circuit(a, c, 200, 99, c1);
  const auto r2 = run_circuit(a, c, 200, 99, c2);
  CHECK(r1 == r2);
  CHECK(c1.lab_time == c2.lab_time);
  CHECK(c1.walk_offsets == c2.walk_offsets);
  CHECK(r1.even_count + r1.odd_count == 200);
  CHECK(c1.lab_time > 0.0);
  CHECK_THROWS_AS(run_circuit(a, c, 0, 1, c1), ValidationError);
}

TEST_CASE("Ramsey fringes decay with the Gaussian T2* envelope") {
  DeviceParameters p = quiet_device();
  p.rabi1 = p.rabi2 = 20e6;
  p.t2star1 = 10e-6;
  const double detuning = 150e3;
  ContextState ctx = ContextState::initial(p);
  ctx.frame_freqs[0] -= detuning;
  SimulationOptions o = no_noise();
  o.quasistatic_noise = true;
  for (double tau : {2e-6, 5e-6, 10e-6, 14e-6}) {
    const auto rec = run_circuit(p, ramsey_circuit(0, tau, false), 10000, derive_seed(3, static_cast<std::uint64_t>(tau * 1e9)), ctx, o);
    const double p_odd = static_cast<double>(rec.odd_count) / rec.shots;
    const double t = tau + 2.0 * p.x90_duration(0) * 2.0 / kPi;
    const double oracle = 0.5 * (1.0 + std::cos(kTwoPi * detuning * t) * std::exp(-std::pow(tau / p.t2star1, 2)));
    CAPTURE(tau);
    CHECK(std::abs(p_odd - oracle) < 0.03);
  }
}

TEST_CASE("exact expectation agrees with Monte Carlo shots") {
  const DeviceParameters p = device_preset("A");
  ContextState ctx = ContextState::initial(p);
  const Circuit c = parse_circuit("X1 ID:4e-6 X1 X2 CZ X2");
  const double exact = expected_even_probability(p, c, ctx);
  const auto rec = run_circuit(p, c, 20000, 17, ctx);
  CHECK(static_cast<double>(rec.even_count) / rec.shots == doctest::Approx(exact).epsilon(0.03));

  const auto rule = gauss_hermite(8);
  double m0 = 0, m2 = 0, m4 = 0;
  for (auto [x, w] : rule) {
    m0 += w;
    m2 += w * x * x;
    m4 += w * x * x * x * x;
  }
  CHECK(m0 == doctest::Approx(1.0));
  CHECK(m2 == doctest::Approx(1.0));
  CHECK(m4 == doctest::Approx(3.0));
}

TEST_CASE("Monte Carlo idle channel converges to the analytic dephasing channel") {
  DeviceParameters p = quiet_device();
  p.t2star1 = 8e-6;
  p.t2star2 = 12e-6;
  p.t2hahn1 = 100e-6;
  p.t2hahn2 = 150e-6;
  const ContextState ctx = ContextState::initial(p);
  const double tau = 6e-6;
  SimulationOptions o = no_noise();
  o.markovian_dephasing = true;
  Rng rng(12);
  Mat16 mc = Mat16::Zero();
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) {
    const auto n = sample_noise_realization(p, ctx, rng);
    mc += simulate_primitive(p, ctx, n, PrimitiveGate::idle(tau), o).ptm().matrix();
  }
  mc /= samples;
  auto coherence = [&](double t2s, double t2h) { return std::exp(-std::pow(tau / t2s, 2)) * std::exp(-tau / t2h); };
  const auto analytic = phase_damping(coherence(p.t2star1, p.t2hahn1), coherence(p.t2star2, p.t2hahn2));
  CHECK((mc - analytic.matrix()).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("advance_context heating, cooldown and walk") {
  DeviceParameters p = device_preset("drift-demo");
  ContextState c = ContextState::initial(p);
  CHECK(heating_shift(p, c, 0) == 0.0);
  c.mw_on_time = 1e3;
  CHECK(heating_shift(p, c, 0) == doctest::Approx(p.drift.heating_amplitude1));
  CHECK(heating_shift(p, c, 0) < 0.0);

  Rng rng(4);
  ContextState hot = ContextState::initial(p);
  hot = advance_context(hot, p, p.drift.heating_tau, p.drift.heating_tau, rng);
  const double s0 = heating_shift(p, hot, 0);
  CHECK(s0 == doctest::Approx(p.drift.heating_amplitude1 * (1 - std::exp(-1.0))));
  const ContextState cooled = advance_context(hot, p, 0.0, p.drift.cooldown_tau, rng);
  CHECK(heating_shift(p, cooled, 0) == doctest::Approx(s0 * std::exp(-1.0)).epsilon(1e-9));
  CHECK(cooled.lab_time == doctest::Approx(hot.lab_time + p.drift.cooldown_tau));

  p.drift.walk_sigma = 1000.0;
  double sum2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const ContextState w = advance_context(ContextState::initial(p), p, 0.0, 4.0, rng);
    sum2 += w.walk_offsets[0] * w.walk_offsets[0];
  }
  CHECK(std::sqrt(sum2 / n) == doctest::Approx(2000.0).epsilon(0.03));
  CHECK_THROWS_AS(advance_context(c, p, -1.0, 0.0, rng), ValidationError);
}

TEST_CASE("frequency feedback") {
  DeviceParameters p = quiet_device();
  SimulationOptions o = no_noise();
  ContextState ctx = ContextState::initial(p);
  const auto same = apply_feedback(p, ctx, 2000, 8, o);
  CHECK(same.success);
  CHECK(std::abs(same.context.frame_freqs[0] - p.f1) < 2e3);
  CHECK(std::abs(same.context.frame_freqs[1] - p.f2) < 2e3);

  ctx.frame_freqs[0] -= 50e3;
  ctx.frame_freqs[1] += 50e3;
  const auto fixed = apply_feedback(p, ctx, 5000, 9, o);
  CHECK(fixed.success);
  CHECK(std::abs(fixed.context.frame_freqs[0] - p.f1) < 1e3);
  CHECK(std::abs(fixed.context.frame_freqs[1] - p.f2) < 1e3);

  // Zero visibility: the probe cannot see the qubit, frames are left alone.
  ContextState far = ContextState::initial(p);
  DeviceParameters dead = p;
  dead.t2star1 = dead.t2star2 = 0.05e-6;
  dead.t2hahn1 = dead.t2hahn2 = 1.0;
  dead.rabi1 = dead.rabi2 = 200e6;
  far.frame_freqs[0] += 1e3;
  const auto failed = apply_feedback(dead, far, 2000, 10, SimulationOptions{});
  CHECK_FALSE(failed.success);
  CHECK(failed.context.frame_freqs == far.frame_freqs);
}

TEST_CASE("feedback reduces RMS detuning under random-walk drift") {
  DeviceParameters p = device_preset("C");
  p.drift.walk_sigma = 3000.0;
  p.readout_time = 1e-3;
  auto rms = [&](bool feedback) {
    ContextState ctx = ContextState::initial(p);
    Rng rng(77);
    double sum2 = 0.0;
    int count = 0;
    for (int step = 0; step < 60; ++step) {
      ctx = advance_context(ctx, p, 0.0, 20.0, rng);
      if (feedback && step % 3 == 0) ctx = apply_feedback(p, ctx, 400, derive_seed(5, step)).context;
      for (int q = 0; q < 2; ++q) {
        const double d = (q == 0 ? p.f1 : p.f2) + ctx.walk_offsets[q] - ctx.frame_freqs[q];
        sum2 += d * d;
        ++count;
      }
    }
    return std::sqrt(sum2 / count);
  };
  const double with = rms(true);
  const double without = rms(false);
  MESSAGE("rms detuning with feedback " << with << " Hz, without " << without << " Hz");
  CHECK(with < without);
}

TEST_CASE("device configuration parsing") {
  const auto j = nlohmann::json::parse(R"({"preset": "B", "stark_coeff": 1234.0, "drift": {"walk_sigma": 5.0}})");
  const auto p = device_from_json(j);
  CHECK(p.stark_coeff == 1234.0);
  CHECK(p.drift.walk_sigma == 5.0);
  CHECK(p.t2star1 == device_preset("B").t2star1);

  const auto bad = nlohmann::json::parse(R"({"preset": "B", "stark": 1.0, "rabi1": "fast", "spam": {"flip": 0.1}})");
  std::vector<std::string> errors;
  device_from_json(bad, errors);
  CHECK(errors.size() == 3);
  CHECK_THROWS_AS(device_from_json(bad), ConfigError);

  const auto partial = nlohmann::json::parse(R"({"f1": 1e9})");
  errors.clear();
  device_from_json(partial, errors);
  CHECK(errors.size() >= 16);

  const auto full = device_to_json(device_preset("drift-demo"));
  const auto back = device_from_json(nlohmann::json::parse(full.dump()));
  CHECK(device_to_json(back) == full);
  CHECK_THROWS_AS(device_from_json(nlohmann::json("Z")), ConfigError);
}
