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

#include <chrono>
#include <iomanip>
#include <cmath>
#include <random>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "spincv/common/seed.hpp"
#include "spincv/gst/taxonomy.hpp"
#include "spincv/qcore/fidelity.hpp"
#include "spincv/qcore/random.hpp"

using namespace spincv;

namespace {

const PrimitiveGate kX1 = PrimitiveGate::of(GateKind::X1_90);
const PrimitiveGate kX2 = PrimitiveGate::of(GateKind::X2_90);
const PrimitiveGate kCZ = PrimitiveGate::of(GateKind::CZ);

std::vector<PrimitiveGate> gate_set() { return {kX1, kX2, kCZ}; }

GateSetModel with_error(GateSetModel m, const PrimitiveGate& g, const ErrorGeneratorDecomposition& e) {
  const int i = m.index_of(g);
  m.ptms[static_cast<std::size_t>(i)] = apply_error_generator(e, m.ptms[static_cast<std::size_t>(i)]);
  return m;
}

ErrorGeneratorDecomposition single(char type, const char* label, double v) {
  ErrorGeneratorDecomposition e;
  (type == 'h' ? e.h(PauliString::from_label(label)) : e.s(PauliString::from_label(label))) = v;
  return e;
}

// Rank of {U^dag E U} computed on 4x4 operators directly.
int operator_rank(const std::vector<Circuit>& fiducials) {
  Mat4c even = Mat4c::Zero();
  even(0, 0) = even(3, 3) = 1.0;
  Eigen::MatrixXcd m(16, 2 * static_cast<Eigen::Index>(fiducials.size()));
  for (std::size_t k = 0; k < fiducials.size(); ++k) {
    const Mat4c u = ideal_unitary(std::span<const PrimitiveGate>(fiducials[k]));
    const Mat4c e = u.adjoint() * even * u;
    const Mat4c o = Mat4c::Identity() - e;
    for (int i = 0; i < 16; ++i) {
      m(i, 2 * static_cast<Eigen::Index>(k)) = e(i / 4, i % 4);
      m(i, 2 * static_cast<Eigen::Index>(k) + 1) = o(i / 4, i % 4);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > 1e-6 * s(0);
  return r;
}

}  // namespace

TEST_CASE("design reaches rank 16 and depth only changes germs") {
  const auto gates = gate_set();
  const GSTDesign d = design_experiment(gates, 4);
  CHECK(d.prep_rank == 16);
  CHECK(d.meas_rank == 16);
  CHECK(operator_rank(d.meas_fiducials) == 16);
  CHECK(preparation_rank(d.prep_fiducials) == 16);
  CHECK(d.depths == std::vector<int>{1, 2, 4});
  CHECK(d.germs.size() == 8);
  CHECK(d.prep_fiducials.front().empty());
  CHECK(d.meas_fiducials.front().empty());

  const GSTDesign deeper = design_experiment(gates, 8);
  CHECK(deeper.prep_fiducials == d.prep_fiducials);
  CHECK(deeper.meas_fiducials == d.meas_fiducials);
  CHECK(deeper.depths.back() == 8);
  CHECK(deeper.circuits.size() > d.circuits.size());

  const GSTDesign projection = design_experiment(gates, 2, FiducialStrategy::SingleQubitProjection);
  CHECK(projection.meas_rank == 16);
  CHECK(operator_rank(projection.meas_fiducials) == 16);
}

TEST_CASE("fiducial-free design fails at rank 2") {
  const auto gates = gate_set();
  CHECK(measurement_rank(std::vector<Circuit>{Circuit{}}) == 2);
  CHECK(operator_rank({Circuit{}}) == 2);
  try {
    design_experiment(gates, 2, FiducialStrategy::None);
    FAIL("expected DesignFailure");
  } catch (const DesignFailure& e) {
    CHECK(e.meas_rank == 2);
    CHECK(std::string(e.what()).find("rank 2") != std::string::npos);
  }
  const std::vector<PrimitiveGate> no_entangler{kX1, kX2};
  CHECK_THROWS_AS(design_experiment(no_entangler, 2), ValidationError);
}

TEST_CASE("noiseless exact data returns the ideal gate set") {
  const auto gates = gate_set();
  const GSTDesign d = design_experiment(gates, 2);
  const GateSetModel ideal = GateSetModel::ideal(gates);
  const auto t0 = std::chrono::steady_clock::now();
  const GSTEstimate e = estimate(d, exact_data(ideal, d.circuits));
  MESSAGE("circuits " << d.circuits.size() << " iterations " << e.iterations << " seconds "
                      << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  CHECK_FALSE(e.mle_failed);
  for (std::size_t g = 0; g < gates.size(); ++g) {
    CHECK((e.model.ptms[g].matrix() - ideal.ptms[g].matrix()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(e.gates[g].average_fidelity == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK((e.model.rho - ideal.rho).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((e.model.effect - ideal.effect).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(e.gates[0].marginal_fidelity[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::isnan(e.gates[2].marginal_fidelity[0]));
  CHECK(taxonomy_report(e).empty());
}

TEST_CASE("injected Hamiltonian ZI error on the entangler is recovered from exact data") {
  const auto gates = gate_set();
  const GSTDesign d = design_experiment(gates, 4);
  const GateSetModel truth = with_error(GateSetModel::ideal(gates), kCZ, single('h', "ZI", 0.01));
  const GSTEstimate e = estimate(d, exact_data(truth, d.circuits));
  const auto& cz = e.gate(kCZ).generator;
  MESSAGE("h_ZI " << cz.h(PauliString::from_label("ZI")) << " iterations " << e.iterations);
  CHECK(cz.h(PauliString::from_label("ZI")) == doctest::Approx(0.01).epsilon(0.10));
  const double f_true = fidelity_metrics(truth.ptms[2], GateSetModel::ideal(gates).ptms[2]).average_gate_fidelity;
  CHECK(e.gate(kCZ).average_fidelity == doctest::Approx(f_true).epsilon(1e-4));
}

TEST_CASE("injected phase flip on an idle is recovered with shot noise") {
  const PrimitiveGate idle = PrimitiveGate::idle(1e-6);
  const std::vector<PrimitiveGate> gates{kX1, kX2, kCZ, idle};
  const GSTDesign d = design_experiment(gates, 4);
  const GateSetModel truth = with_error(GateSetModel::ideal(gates), idle, single('s', "IZ", 0.003));
  const GSTEstimate e = estimate(d, sampled_data(truth, d.circuits, 100000, 11));
  const double s = e.gate(idle).generator.s(PauliString::from_label("IZ"));
  MESSAGE("s_IZ " << s << " iterations " << e.iterations);
  CHECK(s == doctest::Approx(0.003).epsilon(0.20));
}

TEST_CASE("likelihood never decreases and the gradient matches finite differences") {
  const auto gates = gate_set();
  const GSTDesign d = design_experiment(gates, 2);
  // Readout flips and depolarization keep every probability inside (0, 1).
  SpamParameters spam;
  spam.readout_flip_even = 0.02;
  spam.readout_flip_odd = 0.03;
  GateSetModel truth = with_error(GateSetModel::ideal(gates, spam), kX1, single('h', "XI", 0.02));
  truth = with_error(truth, kCZ, single('s', "ZZ", 0.004));
  for (auto& p : truth.ptms) p = p.then(depolarizing(0.99));
  const GSTData data = sampled_data(truth, d.circuits, 1000, 3);
  const GSTEstimate e = estimate(d, data);
  REQUIRE(e.deviance_history.size() > 2);
  for (std::size_t i = 1; i < e.deviance_history.size(); ++i)
    CHECK(e.deviance_history[i] <= e.deviance_history[i - 1]);

  const GSTObjective obj(gates, data);
  Rng rng = make_rng(5);
  Eigen::VectorXd x = obj.pack(truth);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += 1e-3 * standard_normal(rng);
  Eigen::VectorXd grad;
  obj.deviance(x, &grad);
  std::uniform_int_distribution<int> pick(0, obj.dimension() - 1);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int i = pick(rng);
    const double h = 1e-6;
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    const double fd = (obj.deviance(xp) - obj.deviance(xm)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - grad(i)) / std::max(std::abs(grad(i)), 1.0));
  }
  MESSAGE("worst relative gradient mismatch " << worst);
  CHECK(worst < 1e-6);
}

TEST_CASE("reported fidelities are invariant under a gauge applied to the truth") {
  const auto gates = gate_set();
  const GSTDesign d = design_experiment(gates, 2);
  GateSetModel truth = with_error(GateSetModel::ideal(gates), kX2, single('h', "IX", -0.015));
  truth = with_error(truth, kCZ, single('s', "IZ", 0.002));
  truth = with_error(truth, kCZ, single('h', "ZZ", 0.01));
  // Small random unitary gauge; it must commute with the virtual Z frames to
  // leave the data unchanged.
  Rng rng = make_rng(17);
  Mat4c u = Mat4c::Zero();
  for (int k = 0; k < 4; ++k) u(k, k) = std::exp(Complex(0.0, 0.05 * standard_normal(rng)));
  const GateSetModel moved = truth.gauge_transformed(ptm_from_unitary(u).matrix());
  const GSTEstimate a = estimate(d, exact_data(truth, d.circuits));
  const GSTEstimate b = estimate(d, exact_data(moved, d.circuits));
  for (std::size_t g = 0; g < gates.size(); ++g)
    CHECK(std::abs(a.gates[g].average_fidelity - b.gates[g].average_fidelity) < 1e-6);
}

TEST_CASE("estimation error scales as one over root shots") {
  const auto gates = gate_set();
  const GSTDesign d = design_experiment(gates, 1);
  GateSetModel truth = with_error(GateSetModel::ideal(gates), kCZ, single('h', "ZI", 0.01));
  for (auto& p : truth.ptms) p = p.then(depolarizing(0.995));
  const PauliString zi = PauliString::from_label("ZI");
  std::vector<double> logn, logerr;
  for (int shots : {1000, 10000, 100000}) {
    double sq = 0.0;
    constexpr int kSeeds = 8;
    for (int seed = 0; seed < kSeeds; ++seed) {
      const GSTEstimate e = estimate(d, sampled_data(truth, d.circuits, shots, derive_seed(99, static_cast<std::uint64_t>(seed))));
      const double err = e.gate(kCZ).generator.h(zi) - 0.01;
      sq += err * err;
    }
    logn.push_back(std::log(shots));
    logerr.push_back(0.5 * std::log(sq / kSeeds));
  }
  const double mx = (logn[0] + logn[1] + logn[2]) / 3.0, my = (logerr[0] + logerr[1] + logerr[2]) / 3.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i) {
    num += (logn[i] - mx) * (logerr[i] - my);
    den += (logn[i] - mx) * (logn[i] - mx);
  }
  MESSAGE("slope " << num / den);
  CHECK(num / den == doctest::Approx(-0.5).epsilon(0.2));
}

TEST_CASE("taxonomy groups coefficients") {
  const auto gates = gate_set();
  const GSTDesign d = design_experiment(gates, 2);
  const GateSetModel truth = with_error(GateSetModel::ideal(gates), kX1, single('h', "XI", 0.01));
  const GSTEstimate e = estimate(d, exact_data(truth, d.circuits));
  const auto entries = taxonomy_report(e, {.threshold = 1e-3});
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].category == ErrorCategory::Calibration);
  CHECK(entries[0].gate == kX1);
  CHECK(entries[0].type == 'h');
  CHECK(entries[0].pauli.label() == "XI");

  CHECK(classify(kCZ, 'h', PauliString::from_label("IZ"), 1e-3).category == ErrorCategory::Physical);
  CHECK(classify(kCZ, 'h', PauliString::from_label("ZZ"), 1e-3).category == ErrorCategory::Calibration);
  CHECK(classify(kX1, 'h', PauliString::from_label("IX"), 1e-3).category == ErrorCategory::Physical);
  CHECK(classify(kX2, 'h', PauliString::from_label("ZZ"), 1e-3).category == ErrorCategory::Physical);
  CHECK(classify(kX2, 's', PauliString::from_label("ZI"), 1e-3).category == ErrorCategory::Dephasing);
  CHECK(classify(kX2, 's', PauliString::from_label("XY"), 1e-3).category == ErrorCategory::Other);
  CHECK(classify(kX2, 'h', PauliString::from_label("YY"), 1e-3).category == ErrorCategory::Other);

  GateEstimate zero;
  zero.gate = kCZ;
  CHECK(taxonomy_report(std::span<const GateEstimate>(&zero, 1)).empty());
  const std::string csv = taxonomy_csv(entries);
  CHECK(csv.rfind("gate,category,type,pauli,value,attribution\n", 0) == 0);
  CHECK(csv.find("X1,calibration,h,XI,") != std::string::npos);
}

TEST_CASE("records interface checks coverage") {
  const auto gates = gate_set();
  const GSTDesign d = design_experiment(gates, 1);
  const GateSetModel ideal = GateSetModel::ideal(gates);
  std::vector<MeasurementRecord> records;
  for (const auto& c : d.circuits) {
    MeasurementRecord r;
    r.circuit = c;
    r.shots = 100;
    r.even_count = static_cast<int>(std::lround(100 * ideal.even_probability(c)));
    r.odd_count = 100 - r.even_count;
    records.push_back(r);
  }
  const GSTEstimate e = estimate(d, records);
  CHECK(e.gate(kX1).average_fidelity > 0.999);
  records.pop_back();
  CHECK_THROWS_AS(estimate(d, records), ValidationError);
  const GSTData merged = data_from_records(std::vector<MeasurementRecord>{records[0], records[0]});
  CHECK(merged.circuits.size() == 1);
  CHECK(merged.shots[0] == 200.0);
}
