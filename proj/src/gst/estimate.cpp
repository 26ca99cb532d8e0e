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

#include "spincv/gst/estimate.hpp"

#include <cmath>
#include <deque>
#include <iostream>
#include <limits>
#include <map>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "spincv/common/parallel.hpp"
#include "spincv/qcore/cptp.hpp"
#include "spincv/qcore/fidelity.hpp"
#include "spincv/qcore/random.hpp"

namespace spincv {

namespace {

constexpr int kRows = 15 * 16;  // free entries of a trace-preserving PTM
constexpr double kFloor = 1e-4;
constexpr std::size_t kChunks = 32;


Mat4c operator_of(const Vec16& v) {
  Mat4c m = Mat4c::Zero();
  const auto& p = pauli_matrices();
  for (int a = 0; a < 16; ++a) m += 0.5 * v(a) * p[a];
  return m;
}

Vec16 vector_of(const Mat4c& m) {
  Vec16 v;
  const auto& p = pauli_matrices();
  for (int a = 0; a < 16; ++a) v(a) = 0.5 * (p[a] * m).trace().real();
  return v;
}

Vec16 clip_operator(const Vec16& v, double lo, double hi, bool unit_trace) {
  Eigen::SelfAdjointEigenSolver<Mat4c> es(operator_of(v));
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(lo).cwiseMin(hi);
  if (unit_trace) ev /= ev.sum();
  return vector_of(es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
}

std::string key(const Circuit& c) { return to_string(c); }

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// f ln(f/p) + (1-f) ln((1-f)/(1-p)) inside [kFloor, 1 - kFloor]. Outside, a
// quadratic continuation matching value and slope at the edge, with enough
// curvature that an edge frequency (f = 0 or 1) is optimal exactly at the
// boundary probability.
double binomial_term(double f, double p, double* derivative, double* curvature = nullptr) {
  const auto exact = [f](double q, double* d1, double* d2) {
    if (d1) *d1 = -f / q + (1.0 - f) / (1.0 - q);
    if (d2) *d2 = f / (q * q) + (1.0 - f) / ((1.0 - q) * (1.0 - q));
    double v = xlogx(f) + xlogx(1.0 - f);
    if (f > 0.0) v -= f * std::log(q);
    if (f < 1.0) v -= (1.0 - f) * std::log(1.0 - q);
    return v;
  };
  if (p >= kFloor && p <= 1.0 - kFloor) return exact(p, derivative, curvature);
  const bool low = p < kFloor;
  const double edge = low ? kFloor : 1.0 - kFloor;
  double d1 = 0.0, d2 = 0.0;
  const double v = exact(edge, &d1, &d2);
  // Distance from the edge to the physical boundary.
  if (low && d1 > 0.0) d2 = std::max(d2, d1 / kFloor);
  if (!low && d1 < 0.0) d2 = std::max(d2, -d1 / kFloor);
  const double x = p - edge;
  if (derivative) *derivative = d1 + d2 * x;
  if (curvature) *curvature = d2;
  return v + d1 * x + 0.5 * d2 * x * x;
}

struct FitResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::vector<double> history;
};

// Damped Fisher scoring: Levenberg-Marquardt steps on the binomial deviance
// with the expected information as curvature. A step is kept only when the
// deviance decreases.
FitResult fisher_scoring(const GSTObjective& objective, Eigen::VectorXd x, int max_iterations, double tol) {
  FitResult r;
  double value = objective.deviance(x);
  if (!std::isfinite(value)) {
    r.failed = true;
    r.x = std::move(x);
    return r;
  }
  r.history.push_back(value);
  const double saturated = objective.saturated_log_likelihood();
  Eigen::VectorXd p, slope, weight;
  GSTObjective::Jacobian jac;
  double lambda = 1e-3, nu = 2.0;
  bool quiet = false;
  for (int it = 1; it <= max_iterations; ++it) {
    objective.probabilities(x, p, &jac);
    objective.deviance_weights(p, slope, weight);
    const Eigen::VectorXd g = jac.transpose() * slope;
    const GSTObjective::Jacobian scaled = weight.cwiseSqrt().asDiagonal() * jac;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(jac.cols(), jac.cols());
    h.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    h = h.selfadjointView<Eigen::Lower>();
    const double mean_diag = std::max(h.diagonal().mean(), 1e-300);
    bool accepted = false;
    for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
      Eigen::MatrixXd a = h;
      a.diagonal() += lambda * (h.diagonal().array() + 1e-9 * mean_diag).matrix();
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      const Eigen::VectorXd trial = x + step;
      const double v = step.allFinite() ? objective.deviance(trial) : std::numeric_limits<double>::infinity();
      // Gain ratio against the quadratic model.
      const double predicted = -(g.dot(step) + 0.5 * step.dot(h * step));
      if (std::isfinite(v) && v < value) {
        const double change = 0.5 * (value - v) / std::max(std::abs(saturated - 0.5 * v), 1.0);
        quiet = change < tol;
        const double rho = predicted > 0.0 ? (value - v) / predicted : 0.0;
        lambda = std::max(lambda * std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3)), 1e-12);
        nu = 2.0;
        x = trial;
        value = v;
        accepted = true;
      } else {
        lambda *= nu;
        nu *= 2.0;
      }
    }
    r.iterations = it;
    if (!accepted) {
      r.converged = true;  // no descent direction left
      break;
    }
    r.history.push_back(value);
    if (quiet) {
      r.converged = true;
      break;
    }
  }
  r.x = std::move(x);
  return r;
}

Mat16 vz_ptm(const PrimitiveGate& g) { return ideal_circuit_ptm(Circuit{g}).matrix(); }

// Trace-preserving gauge directions (row 0 zero) commuting with both virtual
// Z rotations; these leave every circuit probability unchanged.
const std::vector<Mat16>& commutant_basis() {
  static const std::vector<Mat16> basis = [] {
    const std::array<Mat16, 2> z{vz_ptm(PrimitiveGate::vz1(kPi / 2)), vz_ptm(PrimitiveGate::vz2(kPi / 2))};
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * 256, kRows);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
          const int row = k * 256 + i * 16 + j;
          // (delta Z - Z delta)(i, j)
          for (int m = 0; m < 16; ++m) {
            if (i >= 1) c(row, (i - 1) * 16 + m) += z[static_cast<std::size_t>(k)](m, j);
            if (m >= 1) c(row, (m - 1) * 16 + j) -= z[static_cast<std::size_t>(k)](i, m);
          }
        }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
    lu.setThreshold(1e-10);
    const Eigen::MatrixXd ker = lu.kernel();
    std::vector<Mat16> out;
    for (Eigen::Index k = 0; k < ker.cols(); ++k) {
      Mat16 d = Mat16::Zero();
      for (int r = 1; r < 16; ++r)
        for (int col = 0; col < 16; ++col) d(r, col) = ker((r - 1) * 16 + col, k);
      out.push_back(d / d.norm());
    }
    return out;
  }();
  return basis;
}

// PTM of exp(-i (a ZI + b IZ + c ZZ) / 2).
Mat16 diagonal_unitary_gauge(const Eigen::VectorXd& x) {
  Mat4c u = Mat4c::Zero();
  for (int k = 0; k < 4; ++k) {
    const double z1 = (k & 2) ? -1.0 : 1.0, z2 = (k & 1) ? -1.0 : 1.0;
    u(k, k) = std::exp(Complex(0.0, -0.5 * (x(0) * z1 + x(1) * z2 + x(2) * z1 * z2)));
  }
  return ptm_from_unitary(u).matrix();
}

struct GaugeFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const GateSetModel* model;
  const GateSetModel* target;
  GaugeGroup group;
  int n_inputs;

  int inputs() const { return n_inputs; }
  int values() const { return static_cast<int>(model->ptms.size()) * 256 + 32; }

  Mat16 transform(const Eigen::VectorXd& x) const {
    if (group == GaugeGroup::Unitary) return diagonal_unitary_gauge(x);
    Mat16 t = Mat16::Identity();
    const auto& basis = commutant_basis();
    for (int k = 0; k < n_inputs; ++k) t += x(k) * basis[static_cast<std::size_t>(k)];
    return t;
  }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const GateSetModel m = model->gauge_transformed(transform(x));
    f.resize(values());
    Eigen::Index o = 0;
    for (std::size_t g = 0; g < m.ptms.size(); ++g) {
      const Mat16 d = m.ptms[g].matrix() - target->ptms[g].matrix();
      for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) f(o++) = d(i, j);
    }
    f.segment(o, 16) = m.rho - target->rho;
    f.segment(o + 16, 16) = m.effect - target->effect;
    return 0;
  }
};

double marginal_fidelity(const Mat16& m, const Mat16& ideal, int qubit) {
  Eigen::Matrix4d a, b;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int ii = qubit == 0 ? 4 * i : i, jj = qubit == 0 ? 4 * j : j;
      a(i, j) = m(ii, jj);
      b(i, j) = ideal(ii, jj);
    }
  if (!(b.transpose() * b).isIdentity(1e-9)) return std::numeric_limits<double>::quiet_NaN();
  const double fpro = (b.transpose() * a).trace() / 4.0;
  return (2.0 * fpro + 1.0) / 3.0;
}

}  // namespace

// ---------------------------------------------------------------------------

GateSetModel GateSetModel::ideal(std::span<const PrimitiveGate> gates, const SpamParameters& spam) {
  GateSetModel m;
  m.gates.assign(gates.begin(), gates.end());
  for (const auto& g : gates) m.ptms.push_back(ideal_circuit_ptm(Circuit{g}));
  m.rho = initial_state(spam).pauli_vector();
  m.effect = even_effect_vector(spam);
  return m;
}

int GateSetModel::index_of(const PrimitiveGate& g) const {
  for (std::size_t i = 0; i < gates.size(); ++i)
    if (gates[i] == g) return static_cast<int>(i);
  return -1;
}

double GateSetModel::even_probability(const Circuit& circuit) const {
  Vec16 v = rho;
  for (const auto& g : circuit) {
    if (is_virtual(g.kind)) {
      v = vz_ptm(g) * v;
      continue;
    }
    const int i = index_of(g);
    if (i < 0) throw ValidationError("GateSetModel: gate " + to_token(g) + " is not in the gate set");
    v = ptms[static_cast<std::size_t>(i)].matrix() * v;
  }
  return effect.dot(v);
}

GateSetModel GateSetModel::gauge_transformed(const Mat16& t) const {
  const Mat16 ti = t.inverse();
  GateSetModel m = *this;
  for (auto& p : m.ptms) p = PauliTransferMatrix(ti * p.matrix() * t);
  m.rho = ti * rho;
  m.effect = t.transpose() * effect;
  return m;
}

GSTData data_from_records(std::span<const MeasurementRecord> records) {
  std::map<std::string, std::size_t> index;
  GSTData d;
  std::vector<double> even;
  for (const auto& r : records) {
    if (r.shots <= 0) continue;
    auto [it, fresh] = index.emplace(key(r.circuit), d.circuits.size());
    if (fresh) {
      d.circuits.push_back(r.circuit);
      d.shots.push_back(0.0);
      even.push_back(0.0);
    }
    d.shots[it->second] += r.shots;
    even[it->second] += r.even_count;
  }
  for (std::size_t i = 0; i < even.size(); ++i) d.frequency.push_back(even[i] / d.shots[i]);
  return d;
}

GSTData exact_data(const GateSetModel& truth, std::span<const Circuit> circuits, double weight) {
  GSTData d;
  for (const auto& c : circuits) {
    d.circuits.push_back(c);
    d.frequency.push_back(std::clamp(truth.even_probability(c), 0.0, 1.0));
    d.shots.push_back(weight);
  }
  return d;
}

GSTData sampled_data(const GateSetModel& truth, std::span<const Circuit> circuits, int shots, std::uint64_t seed) {
  if (shots <= 0) throw ValidationError("sampled_data: shots must be positive");
  Rng rng = make_rng(seed);
  GSTData d;
  for (const auto& c : circuits) {
    std::binomial_distribution<int> bin(shots, std::clamp(truth.even_probability(c), 0.0, 1.0));
    d.circuits.push_back(c);
    d.frequency.push_back(static_cast<double>(bin(rng)) / shots);
    d.shots.push_back(shots);
  }
  return d;
}

// ---------------------------------------------------------------------------

GSTObjective::GSTObjective(std::vector<PrimitiveGate> gates, const GSTData& data) : gates_(std::move(gates)) {
  if (data.frequency.size() != data.circuits.size() || data.shots.size() != data.circuits.size())
    throw ValidationError("GSTObjective: data vectors differ in length");
  const int n_gates = static_cast<int>(gates_.size());
  std::vector<PrimitiveGate> virtuals;
  for (const auto& c : data.circuits) {
    std::vector<int> ops;
    ops.reserve(c.size());
    for (const auto& g : c) {
      if (is_virtual(g.kind)) {
        auto it = std::find(virtuals.begin(), virtuals.end(), g);
        if (it == virtuals.end()) {
          virtuals.push_back(g);
          fixed_.push_back(vz_ptm(g));
          it = virtuals.end() - 1;
        }
        ops.push_back(n_gates + static_cast<int>(it - virtuals.begin()));
        continue;
      }
      const auto it = std::find(gates_.begin(), gates_.end(), g);
      if (it == gates_.end()) throw ValidationError("GSTObjective: gate " + to_token(g) + " is not in the gate set");
      ops.push_back(static_cast<int>(it - gates_.begin()));
    }
    ops_.push_back(std::move(ops));
  }
  freq_ = data.frequency;
  shots_ = data.shots;
  dimension_ = n_gates * kRows + 15 + 16;
}

Eigen::VectorXd GSTObjective::pack(const GateSetModel& model) const {
  Eigen::VectorXd x(dimension_);
  const int n = static_cast<int>(gates_.size());
  for (int g = 0; g < n; ++g) {
    const int i = model.index_of(gates_[static_cast<std::size_t>(g)]);
    if (i < 0) throw ValidationError("GSTObjective::pack: model lacks a gate");
    const Mat16& m = model.ptms[static_cast<std::size_t>(i)].matrix();
    for (int r = 1; r < 16; ++r)
      for (int c = 0; c < 16; ++c) x(g * kRows + (r - 1) * 16 + c) = m(r, c);
  }
  x.segment(n * kRows, 15) = model.rho.tail<15>();
  x.segment(n * kRows + 15, 16) = model.effect;
  return x;
}

GateSetModel GSTObjective::unpack(const Eigen::VectorXd& x) const {
  GateSetModel m;
  m.gates = gates_;
  const int n = static_cast<int>(gates_.size());
  for (int g = 0; g < n; ++g) {
    Mat16 p = Mat16::Zero();
    p(0, 0) = 1.0;
    for (int r = 1; r < 16; ++r)
      for (int c = 0; c < 16; ++c) p(r, c) = x(g * kRows + (r - 1) * 16 + c);
    m.ptms.emplace_back(p);
  }
  m.rho(0) = 0.5;
  m.rho.tail<15>() = x.segment(n * kRows, 15);
  m.effect = x.segment(n * kRows + 15, 16);
  return m;
}

double GSTObjective::accumulate(const Eigen::VectorXd& x, Eigen::VectorXd* gradient, bool likelihood) const {
  const GateSetModel model = unpack(x);
  const int n = static_cast<int>(gates_.size());
  std::vector<const Mat16*> table;
  for (const auto& p : model.ptms) table.push_back(&p.matrix());
  for (const auto& f : fixed_) table.push_back(&f);

  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(1, ops_.size()));
  std::vector<double> partial(chunks, 0.0);
  std::vector<Eigen::VectorXd> grads(gradient ? chunks : 0, Eigen::VectorXd::Zero(dimension_));
  parallel_for(chunks, [&](std::size_t chunk) {
    std::vector<Vec16> vs;
    double total = 0.0;
    for (std::size_t c = chunk; c < ops_.size(); c += chunks) {
      const auto& ops = ops_[c];
      vs.resize(ops.size() + 1);
      vs[0] = model.rho;
      for (std::size_t k = 0; k < ops.size(); ++k) vs[k + 1] = *table[static_cast<std::size_t>(ops[k])] * vs[k];
      const double p = model.effect.dot(vs.back());
      const double f = freq_[c], w = shots_[c];
      double slope = 0.0;
      const double term = binomial_term(f, p, gradient ? &slope : nullptr);
      total += likelihood ? w * (xlogx(f) + xlogx(1.0 - f) - term) : 2.0 * w * term;
      if (!gradient) continue;
      Eigen::VectorXd& gr = grads[chunk];
      const double dp = 2.0 * w * slope;
      gr.segment(n * kRows + 15, 16) += dp * vs.back();
      Vec16 u = dp * model.effect;
      for (std::size_t k = ops.size(); k-- > 0;) {
        const int op = ops[k];
        if (op < n) {
          double* block = gr.data() + op * kRows;
          for (int r = 1; r < 16; ++r) {
            const double ur = u(r);
            for (int col = 0; col < 16; ++col) block[(r - 1) * 16 + col] += ur * vs[k](col);
          }
        }
        u = table[static_cast<std::size_t>(op)]->transpose() * u;
      }
      gr.segment(n * kRows, 15) += u.tail<15>();
    }
    partial[chunk] = total;
  });
  double value = 0.0;
  for (double v : partial) value += v;
  if (gradient) {
    gradient->setZero(dimension_);
    for (const auto& g : grads) *gradient += g;
  }
  return value;
}

double GSTObjective::deviance(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const {
  return accumulate(x, gradient, false);
}

double GSTObjective::log_likelihood(const Eigen::VectorXd& x) const { return accumulate(x, nullptr, true); }

double GSTObjective::saturated_log_likelihood() const {
  double total = 0.0;
  for (std::size_t c = 0; c < freq_.size(); ++c) total += shots_[c] * (xlogx(freq_[c]) + xlogx(1.0 - freq_[c]));
  return total;
}

void GSTObjective::probabilities(const Eigen::VectorXd& x, Eigen::VectorXd& p, Jacobian* jacobian) const {
  const GateSetModel model = unpack(x);
  const int n = static_cast<int>(gates_.size());
  std::vector<const Mat16*> table;
  for (const auto& m : model.ptms) table.push_back(&m.matrix());
  for (const auto& f : fixed_) table.push_back(&f);
  p.resize(static_cast<Eigen::Index>(ops_.size()));
  if (jacobian) jacobian->setZero(static_cast<Eigen::Index>(ops_.size()), dimension_);
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(1, ops_.size()));
  parallel_for(chunks, [&](std::size_t chunk) {
    std::vector<Vec16> vs;
    for (std::size_t c = chunk; c < ops_.size(); c += chunks) {
      const auto& ops = ops_[c];
      vs.resize(ops.size() + 1);
      vs[0] = model.rho;
      for (std::size_t k = 0; k < ops.size(); ++k) vs[k + 1] = *table[static_cast<std::size_t>(ops[k])] * vs[k];
      p(static_cast<Eigen::Index>(c)) = model.effect.dot(vs.back());
      if (!jacobian) continue;
      double* row = jacobian->row(static_cast<Eigen::Index>(c)).data();
      for (int i = 0; i < 16; ++i) row[n * kRows + 15 + i] = vs.back()(i);
      Vec16 u = model.effect;
      for (std::size_t k = ops.size(); k-- > 0;) {
        const int op = ops[k];
        if (op < n) {
          double* block = row + op * kRows;
          for (int r = 1; r < 16; ++r) {
            const double ur = u(r);
            for (int col = 0; col < 16; ++col) block[(r - 1) * 16 + col] += ur * vs[k](col);
          }
        }
        u = table[static_cast<std::size_t>(op)]->transpose() * u;
      }
      for (int i = 0; i < 15; ++i) row[n * kRows + i] = u(i + 1);
    }
  });
}

void GSTObjective::deviance_weights(const Eigen::VectorXd& p, Eigen::VectorXd& slope, Eigen::VectorXd& weight) const {
  slope.resize(p.size());
  weight.resize(p.size());
  for (Eigen::Index c = 0; c < p.size(); ++c) {
    const double w = shots_[static_cast<std::size_t>(c)];
    double d = 0.0;
    binomial_term(freq_[static_cast<std::size_t>(c)], p(c), &d);
    slope(c) = 2.0 * w * d;
    const double q = std::clamp(p(c), kFloor, 1.0 - kFloor);
    weight(c) = 2.0 * w / (q * (1.0 - q));
  }
}

// ---------------------------------------------------------------------------

GateSetModel linear_inversion(const GSTDesign& design, const GSTData& data) {
  std::map<std::string, double> f;
  for (std::size_t i = 0; i < data.circuits.size(); ++i) f[key(data.circuits[i])] = data.frequency[i];
  auto lookup = [&](const Circuit& c) {
    const auto it = f.find(key(c));
    if (it == f.end()) throw ValidationError("linear_inversion: data lacks circuit " + key(c));
    return it->second;
  };
  auto cat = [](Circuit a, const Circuit& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const auto& preps = design.prep_fiducials;
  const auto& meas = design.meas_fiducials;
  const Eigen::Index np = static_cast<Eigen::Index>(preps.size()), nm = static_cast<Eigen::Index>(meas.size());
  const auto empty_prep = std::find(preps.begin(), preps.end(), Circuit{});
  const auto empty_meas = std::find(meas.begin(), meas.end(), Circuit{});
  if (empty_prep == preps.end() || empty_meas == meas.end())
    throw ValidationError("linear_inversion: design must contain the empty fiducial");

  // Rows 2j and 2j+1 hold the even and odd outcomes of measurement fiducial j.
  Eigen::MatrixXd gram(2 * nm, np), bt(16, np);
  const Vec16 rho0 = DensityMatrix::computational(0).pauli_vector();
  for (Eigen::Index i = 0; i < np; ++i) {
    bt.col(i) = ideal_circuit_ptm(preps[static_cast<std::size_t>(i)]).apply(rho0);
    for (Eigen::Index j = 0; j < nm; ++j) {
      gram(2 * j, i) = lookup(cat(preps[static_cast<std::size_t>(i)], meas[static_cast<std::size_t>(j)]));
      gram(2 * j + 1, i) = 1.0 - gram(2 * j, i);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-8 * sv(0))
    std::clog << "linear_inversion: ill-conditioned Gram matrix, condition number "
              << sv(0) / std::max(sv(sv.size() - 1), 1e-300) << "; using pseudo-inverse\n";
  const Eigen::MatrixXd gram_pinv = gram.completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::MatrixXd bt_pinv = bt.completeOrthogonalDecomposition().pseudoInverse();

  GateSetModel m;
  m.gates = design.gates;
  for (const auto& g : design.gates) {
    Eigen::MatrixXd pg(2 * nm, np);
    for (Eigen::Index i = 0; i < np; ++i)
      for (Eigen::Index j = 0; j < nm; ++j) {
        pg(2 * j, i) =
            lookup(cat(cat(preps[static_cast<std::size_t>(i)], Circuit{g}), meas[static_cast<std::size_t>(j)]));
        pg(2 * j + 1, i) = 1.0 - pg(2 * j, i);
      }
    const Eigen::MatrixXd est = bt * (gram_pinv * pg) * bt_pinv;
    m.ptms.emplace_back(Mat16(est));
  }
  Eigen::VectorXd a_rho(2 * nm), e_b(np);
  for (Eigen::Index j = 0; j < 2 * nm; ++j) a_rho(j) = gram(j, empty_prep - preps.begin());
  for (Eigen::Index i = 0; i < np; ++i) e_b(i) = gram(2 * (empty_meas - meas.begin()), i);
  m.rho = bt * (gram_pinv * a_rho);
  m.effect = bt_pinv.transpose() * e_b;
  return m;
}

Mat16 optimal_gauge(const GateSetModel& model, GaugeGroup group) {
  const GateSetModel target = GateSetModel::ideal(model.gates);
  GaugeFunctor functor{&model, &target, group,
                       group == GaugeGroup::Unitary ? 3 : static_cast<int>(commutant_basis().size())};
  Eigen::NumericalDiff<GaugeFunctor, Eigen::Central> diff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<GaugeFunctor, Eigen::Central>> lm(diff);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(functor.n_inputs);
  lm.minimize(x);
  return functor.transform(x);
}

const GateEstimate& GSTEstimate::gate(const PrimitiveGate& g) const {
  for (const auto& e : gates)
    if (e.gate == g) return e;
  throw ValidationError("GSTEstimate: gate " + to_token(g) + " was not estimated");
}

GSTEstimate estimate(const GSTDesign& design, const GSTData& data, const EstimateOptions& options) {
  if (options.max_iterations < 0) throw ValidationError("estimate: max_iterations must be >= 0");
  GSTEstimate out;
  out.lgst = linear_inversion(design, data);

  // Physical starting point: every predicted probability lies in [0, 1].
  GateSetModel start = out.lgst;
  for (auto& p : start.ptms) p = cptp_project(p, 1e-10, 5000).ptm;
  start.rho = clip_operator(start.rho, 0.0, std::numeric_limits<double>::infinity(), true);
  start.effect = clip_operator(start.effect, 0.0, 1.0, false);

  const GSTObjective objective(design.gates, data);
  const FitResult r = fisher_scoring(objective, objective.pack(start), options.max_iterations, options.tolerance);
  GateSetModel fitted;
  if (r.failed || !r.x.allFinite()) {
    out.mle_failed = true;
    fitted = start;
  } else {
    fitted = objective.unpack(r.x);
    out.deviance_history = r.history;
    out.iterations = r.iterations;
    out.converged = r.converged;
  }

  fitted = fitted.gauge_transformed(optimal_gauge(fitted, options.gauge));
  if (options.cptp)
    for (auto& p : fitted.ptms) p = cptp_project(p, 1e-10, 5000).ptm;
  fitted.rho = clip_operator(fitted.rho, 0.0, std::numeric_limits<double>::infinity(), true);
  fitted.effect = clip_operator(fitted.effect, 0.0, 1.0, false);
  out.model = fitted;

  const Eigen::VectorXd xf = objective.pack(fitted);
  out.deviance = objective.deviance(xf);
  out.log_likelihood = objective.log_likelihood(xf);

  for (std::size_t g = 0; g < fitted.gates.size(); ++g) {
    GateEstimate e;
    e.gate = fitted.gates[g];
    e.ptm = fitted.ptms[g];
    const PauliTransferMatrix ideal = ideal_circuit_ptm(Circuit{e.gate});
    try {
      e.generator = error_generator_decompose(e.ptm, ideal);
    } catch (const GeneratorUndefined&) {
      e.generator_defined = false;
    }
    e.average_fidelity = fidelity_metrics(e.ptm, ideal).average_gate_fidelity;
    for (int q = 0; q < 2; ++q) e.marginal_fidelity[static_cast<std::size_t>(q)] = marginal_fidelity(e.ptm.matrix(), ideal.matrix(), q);
    out.gates.push_back(e);
  }
  return out;
}

}  // namespace spincv

namespace spincv {

GSTEstimate estimate(const GSTDesign& design, std::span<const MeasurementRecord> records,
                     const EstimateOptions& options) {
  const GSTData data = data_from_records(records);
  std::map<std::string, double> shots;
  for (std::size_t i = 0; i < data.circuits.size(); ++i) shots[key(data.circuits[i])] = data.shots[i];
  for (const auto& c : design.circuits) {
    const auto it = shots.find(key(c));
    if (it == shots.end() || it->second < 1.0) throw ValidationError("estimate: records lack circuit " + key(c));
  }
  return estimate(design, data, options);
}

}  // namespace spincv
