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

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "spincv/common/errors.hpp"
#include "spincv/qcore/cptp.hpp"
#include "spincv/qcore/error_generator.hpp"
#include "spincv/qcore/fidelity.hpp"
#include "spincv/qcore/random.hpp"

using namespace spincv;

namespace {

Mat4c cz() {
  Mat4c u = Mat4c::Identity();
  u(3, 3) = -1.0;
  return u;
}

Mat2c rx(double theta) {
  Mat2c r;
  r << std::cos(theta / 2), Complex(0, -std::sin(theta / 2)), Complex(0, -std::sin(theta / 2)), std::cos(theta / 2);
  return r;
}

Mat4c pauli_rotation(PauliString p, double theta) {
  return std::cos(theta) * Mat4c::Identity() - Complex(0, std::sin(theta)) * p.matrix();
}

// Choi matrix built straight from Kraus operators: sum_ij |i><j| (x) E(|i><j|).
Mat16c choi_from_kraus(const std::vector<Mat4c>& kraus) {
  Mat16c j = Mat16c::Zero();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      Mat4c e = Mat4c::Zero();
      e(r, c) = 1.0;
      Mat4c image = Mat4c::Zero();
      for (const auto& k : kraus) image += k * e * k.adjoint();
      j.block<4, 4>(4 * r, 4 * c) = image;
    }
  return j;
}

std::vector<Mat4c> depolarizing_kraus(double p) {
  std::vector<Mat4c> k;
  const double q = (1.0 - p) / 16.0;
  for (int a = 0; a < 16; ++a) {
    const double w = a == 0 ? 1.0 - 15.0 * q : q;
    k.push_back(std::sqrt(w) * PauliString(a).matrix());
  }
  return k;
}

PauliTransferMatrix random_cptp(Rng& rng) {
  // Convex mixture of unitary channels.
  Mat16 m = Mat16::Zero();
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double w = uniform01(rng);
    m += w * ptm_from_unitary(haar_unitary(rng)).matrix();
    total += w;
  }
  return PauliTransferMatrix(m / total);
}

}  // namespace

TEST_CASE("Pauli strings are self-inverse, traceless and orthogonal") {
  for (int a = 0; a < 16; ++a) {
    const Mat4c& pa = PauliString(a).matrix();
    CHECK((pa * pa - Mat4c::Identity()).norm() < 1e-15);
    CHECK(std::abs(pa.trace()) == doctest::Approx(a == 0 ? 4.0 : 0.0));
    for (int b = 0; b < 16; ++b) {
      const Complex hs = (pa.adjoint() * PauliString(b).matrix()).trace();
      CHECK(std::abs(hs - Complex(a == b ? 4.0 : 0.0)) < 1e-14);
    }
  }
  CHECK(PauliString::from_label("XZ").index() == 7);
  CHECK(PauliString(13).label() == "ZX");
  CHECK_THROWS_AS(PauliString::from_label("XQ"), ValidationError);
}

TEST_CASE("Pauli multiplication matches the matrix product") {
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      const auto prod = multiply(PauliString(a), PauliString(b));
      const Mat4c lhs = PauliString(a).matrix() * PauliString(b).matrix();
      CHECK((lhs - prod.phase * PauliString(prod.index).matrix()).norm() < 1e-14);
      CHECK(PauliString(a).commutes_with(PauliString(b)) == ((lhs - lhs.adjoint()).norm() < 1e-14));
    }
}

TEST_CASE("density matrix validation") {
  Mat4c bad = Mat4c::Zero();
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(DensityMatrix{bad}, ValidationError);
  bad(0, 0) = 1.0;
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(DensityMatrix{bad}, ValidationError);
  Mat4c neg = Mat4c::Zero();
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, ValidationError);
  const auto rho = DensityMatrix::computational(0);
  const auto back = DensityMatrix::from_pauli_vector(rho.pauli_vector());
  CHECK((back.matrix() - rho.matrix()).norm() < 1e-15);
}

TEST_CASE("ptm_from_unitary examples") {
  CHECK((ptm_from_unitary(Mat4c::Identity()).matrix() - Mat16::Identity()).norm() < 1e-15);

  const auto m = ptm_from_unitary(cz());
  const int xi = PauliString::from_label("XI").index();
  const int xz = PauliString::from_label("XZ").index();
  CHECK(m(xz, xi) == doctest::Approx(1.0));
  CHECK(m.is_trace_preserving());
  CHECK(m.is_orthogonal());

  const auto r = ptm_from_unitary(kron(rx(kPi / 2), Mat2c::Identity()));
  const int yi = PauliString::from_label("YI").index();
  const int zi = PauliString::from_label("ZI").index();
  CHECK(r(zi, yi) == doctest::Approx(1.0));
  CHECK(r(yi, zi) == doctest::Approx(-1.0));
  for (int q2 = 0; q2 < 4; ++q2) CHECK(r(q2, q2) == doctest::Approx(1.0));

  Mat4c nonunitary = Mat4c::Identity();
  nonunitary(0, 0) = 1.001;
  CHECK_THROWS_AS(ptm_from_unitary(nonunitary), ValidationError);
}

TEST_CASE("compose matches the direct unitary product") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat4c u1 = haar_unitary(rng);
    const Mat4c u2 = haar_unitary(rng);
    const std::array<PauliTransferMatrix, 2> seq{ptm_from_unitary(u1), ptm_from_unitary(u2)};
    const Mat16 composed = compose(seq).matrix();
    CHECK((composed - ptm_from_unitary(u2 * u1).matrix()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((composed * composed.transpose() - Mat16::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
  const auto m = ptm_from_unitary(haar_unitary(rng));
  const std::array<PauliTransferMatrix, 1> single{m};
  CHECK((compose(single).matrix() - m.matrix()).norm() < 1e-15);
  const std::array<PauliTransferMatrix, 2> inverse{m, m.transpose()};
  CHECK((compose(inverse).matrix() - Mat16::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(compose(std::span<const PauliTransferMatrix>{}), ValidationError);
}

TEST_CASE("fidelity of depolarizing and rotated channels against trace oracles") {
  const auto ideal = ptm_from_unitary(cz());
  const auto same = fidelity_metrics(ideal, ideal);
  CHECK(same.process_fidelity == doctest::Approx(1.0));
  CHECK(same.average_gate_fidelity == doctest::Approx(1.0));

  for (double p : {0.9, 0.98, 0.999}) {
    const auto actual = ideal.then(depolarizing(p));
    // Entanglement fidelity from the Kraus-built Choi matrix: <Omega|J_err|Omega>/16.
    const Mat16c j = choi_from_kraus(depolarizing_kraus(p));
    Eigen::Matrix<Complex, 16, 1> omega = Eigen::Matrix<Complex, 16, 1>::Zero();
    for (int i = 0; i < 4; ++i) omega(5 * i) = 1.0;
    const double oracle = (omega.adjoint() * j * omega)(0, 0).real() / 16.0;
    const auto f = fidelity_metrics(actual, ideal);
    CHECK(f.process_fidelity == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(f.process_fidelity == doctest::Approx((15 * p + 1) / 16).epsilon(1e-12));
    CHECK(f.average_gate_fidelity == doctest::Approx((4 * f.process_fidelity + 1) / 5).epsilon(1e-12));
  }

  const double theta = 0.02;
  const Mat4c rz = kron(Mat2c(Eigen::Vector2cd(std::exp(Complex(0, -theta / 2)), std::exp(Complex(0, theta / 2))).asDiagonal()),
                        Mat2c::Identity());
  const auto f = fidelity_metrics(ideal.then(ptm_from_unitary(rz)), ideal);
  const double oracle = std::norm(rz.trace()) / 16.0;
  CHECK(f.process_fidelity == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(f.average_gate_fidelity == doctest::Approx(1.0 - 0.8 * std::pow(std::sin(theta / 2), 2)).epsilon(1e-12));

  CHECK_THROWS_AS(fidelity_metrics(ideal, depolarizing(0.9)), ValidationError);
}

TEST_CASE("generator conventions match unitary and Kraus oracles") {
  Rng rng(3);
  for (int k = 1; k < 16; ++k) {
    const PauliString p(k);
    const double theta = 0.3;
    const Eigen::Matrix<double, 16, 16> h = hamiltonian_generator(p);
    const Mat16 e = Eigen::Matrix<double, 16, 16>((theta * h).exp());
    CHECK((e - ptm_from_unitary(pauli_rotation(p, theta)).matrix()).cwiseAbs().maxCoeff() < 1e-12);

    const double eps = 0.05;
    const Eigen::Matrix<double, 16, 16> s = stochastic_generator(p);
    const Mat16 es = Eigen::Matrix<double, 16, 16>((-0.5 * std::log(1 - 2 * eps) * s).exp());
    std::array<double, 16> probs{};
    probs[0] = 1 - eps;
    probs[k] = eps;
    CHECK((es - pauli_channel(probs).matrix()).cwiseAbs().maxCoeff() < 1e-12);

    for (int k2 = 1; k2 < 16; ++k2) {
      const double hh = hamiltonian_generator(p).cwiseProduct(hamiltonian_generator(PauliString(k2))).sum();
      const double hs = hamiltonian_generator(p).cwiseProduct(stochastic_generator(PauliString(k2))).sum();
      CHECK(std::abs(hs) < 1e-14);
      if (k2 != k) CHECK(std::abs(hh) < 1e-14);
    }
  }
}

TEST_CASE("error_generator_decompose examples") {
  const auto ideal = ptm_from_unitary(cz());
  const auto zero = error_generator_decompose(ideal, ideal);
  for (int k = 0; k < 15; ++k) {
    CHECK(std::abs(zero.hamiltonian[k]) < 1e-12);
    CHECK(std::abs(zero.stochastic[k]) < 1e-12);
  }
  CHECK(zero.residual_norm < 1e-12);

  const PauliString zi = PauliString::from_label("ZI");
  ErrorGeneratorDecomposition injected;
  injected.h(zi) = 0.01;
  const auto got = error_generator_decompose(apply_error_generator(injected, ideal), ideal);
  CHECK(got.h(zi) == doctest::Approx(0.01).epsilon(1e-6));
  for (int k = 0; k < 15; ++k) CHECK(std::abs(got.stochastic[k]) < 1e-10);

  const double eps = 0.005;
  std::array<double, 16> probs{};
  probs[0] = 1 - eps;
  probs[zi.index()] = eps;
  const auto flip = error_generator_decompose(ideal.then(pauli_channel(probs)), ideal);
  CHECK(flip.s(zi) == doctest::Approx(eps).epsilon(0.05));
  CHECK(flip.s(zi) == doctest::Approx(-0.5 * std::log(1 - 2 * eps)).epsilon(1e-10));
  for (int k = 0; k < 15; ++k) CHECK(std::abs(flip.hamiltonian[k]) < 1e-12);
}

TEST_CASE("decompose inverts the generator map for small coefficients") {
  Rng rng(5);
  std::uniform_real_distribution<double> h(-0.05, 0.05), s(0.0, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    ErrorGeneratorDecomposition c;
    for (int k = 0; k < 15; ++k) {
      c.hamiltonian[k] = h(rng);
      c.stochastic[k] = s(rng);
    }
    const auto ideal = ptm_from_unitary(haar_unitary(rng));
    const auto back = error_generator_decompose(apply_error_generator(c, ideal), ideal);
    for (int k = 0; k < 15; ++k) {
      CHECK(back.hamiltonian[k] == doctest::Approx(c.hamiltonian[k]).epsilon(0.01));
      CHECK(back.stochastic[k] == doctest::Approx(c.stochastic[k]).epsilon(0.01));
    }
    CHECK(back.residual_norm < 1e-8);
  }
}

TEST_CASE("logarithm on the branch cut raises GeneratorUndefined") {
  const auto ideal = PauliTransferMatrix::identity();
  const auto flip = ptm_from_unitary(PauliString::from_label("ZI").matrix());
  CHECK_THROWS_AS(error_generator_decompose(flip, ideal), GeneratorUndefined);
  CHECK_THROWS_AS(error_generator_decompose(depolarizing(0.0), ideal), GeneratorUndefined);
}

TEST_CASE("Choi map agrees with a Kraus-built oracle and is an isometry") {
  Rng rng(9);
  const Mat4c u = haar_unitary(rng);
  const Mat16c oracle = choi_from_kraus({u});
  const Mat16c j = choi_from_ptm(ptm_from_unitary(u));
  CHECK((j - oracle).cwiseAbs().maxCoeff() < 1e-12);
  const auto m = random_cptp(rng);
  CHECK(choi_from_ptm(m).norm() == doctest::Approx(m.matrix().norm()).epsilon(1e-12));
  CHECK((ptm_from_choi(choi_from_ptm(m)).matrix() - m.matrix()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("cptp_check examples") {
  const auto c = cptp_check(ptm_from_unitary(cz()));
  CHECK(c.is_tp);
  CHECK(std::abs(c.min_choi_eigenvalue) < 1e-10);

  CHECK_FALSE(cptp_check(PauliTransferMatrix(1.01 * ptm_from_unitary(cz()).matrix())).is_tp);

  const double p = 0.9;
  Eigen::SelfAdjointEigenSolver<Mat16c> es(choi_from_kraus(depolarizing_kraus(p)), Eigen::EigenvaluesOnly);
  const auto d = cptp_check(depolarizing(p));
  CHECK(d.min_choi_eigenvalue == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-12));
  CHECK(d.min_choi_eigenvalue == doctest::Approx((1 - p) / 4).epsilon(1e-12));
}

TEST_CASE("cptp_project is idempotent on CPTP inputs and repairs violations") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_cptp(rng);
    const auto proj = cptp_project(m);
    CHECK(proj.converged);
    CHECK((proj.ptm.matrix() - m.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
  const auto ideal = ptm_from_unitary(cz());
  Mat16 bad = depolarizing(1.02).matrix() * ideal.matrix();
  bad(0, 3) = 0.01;
  const auto proj = cptp_project(PauliTransferMatrix(bad));
  CHECK(proj.converged);
  const auto check = cptp_check(proj.ptm);
  CHECK(check.is_cptp());
  const auto f_raw = fidelity_metrics(PauliTransferMatrix(bad), ideal);
  const auto f = fidelity_metrics(proj.ptm, ideal);
  CHECK(f_raw.process_fidelity > 1.0);
  CHECK(f.process_fidelity <= 1.0 + 1e-12);
  CHECK(std::abs(f.process_fidelity - f_raw.process_fidelity) <= proj.distance);
  const auto again = cptp_project(proj.ptm);
  CHECK((again.ptm.matrix() - proj.ptm.matrix()).cwiseAbs().maxCoeff() < 1e-9);
}
