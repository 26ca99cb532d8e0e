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

#include "spincv/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "spincv/common/errors.hpp"
#include "spincv/common/parallel.hpp"
#include "spincv/common/seed.hpp"
#include "spincv/device/config.hpp"
#include "spincv/fbt/trace.hpp"
#include "spincv/gst/taxonomy.hpp"
#include "spincv/harness/records.hpp"
#include "spincv/irb/fit.hpp"
#include "spincv/qcore/random.hpp"

namespace spincv {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::pair<ExperimentKind, std::string_view> kKinds[] = {
    {ExperimentKind::Irb, "irb"},
    {ExperimentKind::FbtOnIrb, "fbt-on-irb"},
    {ExperimentKind::Gst, "gst"},
    {ExperimentKind::DriftDemo, "drift-demo"},
    {ExperimentKind::FeedbackDemo, "feedback-demo"},
};

constexpr std::pair<FiducialStrategy, std::string_view> kStrategies[] = {
    {FiducialStrategy::ParityNative, "parity"},
    {FiducialStrategy::SingleQubitProjection, "projection"},
    {FiducialStrategy::None, "none"},
};

constexpr std::pair<GaugeGroup, std::string_view> kGauges[] = {
    {GaugeGroup::Full, "full"},
    {GaugeGroup::Unitary, "unitary"},
};

template <class E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E value) {
  for (const auto& [v, n] : table)
    if (v == value) return n;
  return "?";
}

template <class E, std::size_t N>
bool value_of(const std::pair<E, std::string_view> (&table)[N], std::string_view name, E& out) {
  for (const auto& [v, n] : table)
    if (n == name) {
      out = v;
      return true;
    }
  return false;
}

// Reads one JSON object section, records every problem and flags unknown keys.
class Section {
 public:
  Section(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) errors_.push_back(path_ + ": expected an object");
  }

  ~Section() {
    if (!j_.is_object()) return;
    for (const auto& item : j_.items())
      if (!known_.contains(item.key())) errors_.push_back(path_ + "." + item.key() + ": unknown key");
  }

  const json* find(const std::string& key) {
    known_.insert(key);
    if (!j_.is_object()) return nullptr;
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void error(const std::string& key, const std::string& message) { errors_.push_back(path_ + "." + key + ": " + message); }

  void integer(const std::string& key, int& out, int min, int max = 1 << 30) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number_integer()) return error(key, "expected an integer");
    const auto x = v->get<long long>();
    if (x < min || x > max) return error(key, "must be in [" + std::to_string(min) + ", " + std::to_string(max) + "]");
    out = static_cast<int>(x);
  }

  void number(const std::string& key, double& out, double min, double max) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number()) return error(key, "expected a number");
    const double x = v->get<double>();
    if (!(x >= min && x <= max)) {
      std::ostringstream os;
      os << "must be in [" << min << ", " << max << "]";
      return error(key, os.str());
    }
    out = x;
  }

  void boolean(const std::string& key, bool& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_boolean()) return error(key, "expected true or false");
    out = v->get<bool>();
  }

  bool string(const std::string& key, std::string& out) {
    const json* v = find(key);
    if (!v) return false;
    if (!v->is_string()) {
      error(key, "expected a string");
      return false;
    }
    out = v->get<std::string>();
    return true;
  }

  template <class E, std::size_t N>
  void choice(const std::string& key, const std::pair<E, std::string_view> (&table)[N], E& out) {
    std::string s;
    if (!string(key, s)) return;
    if (value_of(table, s, out)) return;
    std::string options;
    for (const auto& [v, n] : table) options += (options.empty() ? "" : ", ") + std::string(n);
    error(key, "unknown value '" + s + "' (expected one of " + options + ")");
  }

  void entangler(const std::string& key, Entangler& out) {
    std::string s;
    if (!string(key, s)) return;
    if (s == "CZ") out = Entangler::CZ;
    else if (s == "DCZ") out = Entangler::DCZ;
    else error(key, "unknown entangler '" + s + "' (expected CZ or DCZ)");
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> known_;
};

void read_irb(const json& j, IrbSettings& s, std::vector<std::string>& errors) {
  Section sec(j, "irb", errors);
  if (const json* v = sec.find("lengths")) {
    std::vector<int> lengths;
    bool ok = v->is_array() && !v->empty();
    if (ok)
      for (const auto& x : *v) {
        if (!x.is_number_integer() || x.get<long long>() < 1 || x.get<long long>() > 100000) {
          ok = false;
          break;
        }
        lengths.push_back(x.get<int>());
      }
    if (ok && std::adjacent_find(lengths.begin(), lengths.end(), std::greater_equal<>()) != lengths.end()) ok = false;
    if (ok) s.lengths = lengths;
    else sec.error("lengths", "expected a strictly increasing, non-empty array of positive integers");
  }
  sec.integer("randomizations", s.randomizations, 2);
  sec.integer("shots", s.shots, 1);
  sec.entangler("entangler", s.entangler);
  sec.integer("bootstrap_samples", s.bootstrap_samples, 0);
  sec.boolean("shuffle", s.shuffle);
  sec.boolean("fix_asymptote", s.fix_asymptote);
}

void read_fbt(const json& j, FbtSettings& s, std::vector<std::string>& errors) {
  Section sec(j, "fbt", errors);
  sec.number("prior_sigma", s.prior_sigma, 1e-9, 1.0);
  sec.boolean("relinearize", s.relinearize);
  sec.integer("window_circuits", s.window_circuits, 1);
  sec.boolean("reprior", s.reprior);
  sec.number("inflation", s.inflation, 1.0, 1e6);
  sec.integer("samples", s.samples, 2);
}

void read_gst(const json& j, GstSettings& s, std::vector<std::string>& errors) {
  Section sec(j, "gst", errors);
  if (const json* v = sec.find("gates")) {
    std::vector<PrimitiveGate> gates;
    bool ok = v->is_array() && !v->empty();
    if (!ok) sec.error("gates", "expected a non-empty array of gate tokens");
    if (ok)
      for (const auto& x : *v) {
        if (!x.is_string()) {
          sec.error("gates", "expected gate tokens as strings");
          ok = false;
          break;
        }
        try {
          gates.push_back(from_token(x.get<std::string>()));
        } catch (const ValidationError& e) {
          sec.error("gates", e.what());
          ok = false;
        }
      }
    if (ok) s.gates = gates;
  }
  sec.integer("max_depth", s.max_depth, 1, 64);
  sec.integer("shots", s.shots, 0);
  sec.integer("quadrature_nodes", s.quadrature_nodes, 1, 16);
  sec.choice("fiducials", kStrategies, s.fiducials);
  sec.choice("gauge", kGauges, s.gauge);
  sec.number("taxonomy_threshold", s.taxonomy_threshold, 0.0, 1.0);
}

void read_feedback(const json& j, FeedbackSettings& s, std::vector<std::string>& errors) {
  Section sec(j, "feedback", errors);
  sec.integer("cadence", s.cadence, 0);
  sec.integer("probe_shots", s.probe_shots, 1);
}

// ---------------------------------------------------------------------------

ordered_json fit_json(const DecayFit& f) {
  ordered_json j;
  j["A"] = f.A;
  j["B"] = f.B;
  j["p"] = f.p;
  j["rms_residual"] = f.rms_residual;
  j["converged"] = f.converged;
  return j;
}

ordered_json irb_json(const IrbResult& r) {
  ordered_json j;
  j["f_clifford"] = r.f_clifford;
  j["f_clifford_sigma"] = r.f_clifford_sigma;
  j["f_gate"] = r.f_gate;
  j["f_gate_sigma"] = r.f_gate_sigma;
  j["f_gate_low"] = r.f_gate_low;
  j["f_gate_high"] = r.f_gate_high;
  j["unphysical"] = r.unphysical;
  j["converged"] = r.converged;
  j["bootstrap_samples"] = r.bootstrap_samples;
  j["reference"] = fit_json(r.reference);
  j["interleaved"] = fit_json(r.interleaved);
  return j;
}

IrbResult analyse_irb(std::span<const MeasurementRecord> records, const IrbSettings& s, const std::string& prefix,
                      std::uint64_t seed) {
  IrbOptions opts;
  opts.bootstrap_samples = s.bootstrap_samples;
  opts.fit.fix_b = s.fix_asymptote;
  opts.seed = seed;
  return fit_and_extract(dataset_from_records(records, prefix + "reference"),
                         dataset_from_records(records, prefix + "interleaved"), opts);
}

std::vector<PosteriorSnapshot> run_fbt(const ExperimentConfig& c, std::span<const MeasurementRecord> records,
                                       std::uint64_t seed) {
  FbtConfig fc;
  fc.tracked = {GateKind::X1_90, GateKind::X2_90, entangler_kind(c.irb.entangler)};
  fc.prior_sigma = c.fbt.prior_sigma;
  fc.relinearize = c.fbt.relinearize;
  fc.spam = c.device.spam;
  GateErrorModel model(fc);
  TraceOptions to;
  to.window_circuits = c.fbt.window_circuits;
  to.reprior = c.fbt.reprior;
  to.inflation = c.fbt.inflation;
  to.summary.samples = c.fbt.samples;
  to.seed = seed;
  std::vector<MeasurementRecord> ordered(records.begin(), records.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.lab_time < b.lab_time; });
  return fidelity_trace(model, ordered, to);
}

ordered_json trace_json(std::span<const PosteriorSnapshot> snaps) {
  ordered_json out = ordered_json::array();
  for (const auto& s : snaps) {
    ordered_json j;
    j["window"] = s.window;
    j["lab_time"] = s.lab_time;
    j["circuits"] = s.circuits;
    auto& gates = j["gates"] = ordered_json::array();
    for (const auto& g : s.gates) {
      ordered_json e;
      e["gate"] = gate_kind_name(g.gate);
      e["f_mean"] = g.f_mean;
      e["f_median"] = g.f_median;
      e["f_low"] = g.f_low;
      e["f_high"] = g.f_high;
      gates.push_back(e);
    }
    out.push_back(j);
  }
  return out;
}

// First/last-window comparison and the physicality check of one gate's trace.
ordered_json trace_summary(std::span<const PosteriorSnapshot> snaps, GateKind gate) {
  ordered_json j;
  std::vector<GateFidelitySummary> g;
  for (const auto& s : snaps)
    for (const auto& e : s.gates)
      if (e.gate == gate) g.push_back(e);
  j["gate"] = gate_kind_name(gate);
  j["windows"] = g.size();
  if (g.empty()) return j;
  bool physical = true, monotone = true;
  for (std::size_t i = 0; i < g.size(); ++i) {
    physical = physical && g[i].f_high <= 1.0 && g[i].f_mean <= 1.0;
    if (i > 0) monotone = monotone && g[i].f_median <= g[i - 1].f_median;
  }
  j["first_median"] = g.front().f_median;
  j["first_interval"] = {g.front().f_low, g.front().f_high};
  j["last_median"] = g.back().f_median;
  j["last_interval"] = {g.back().f_low, g.back().f_high};
  j["infidelity_ratio"] = (1.0 - g.back().f_median) / (1.0 - g.front().f_median);
  j["intervals_disjoint"] = g.back().f_high < g.front().f_low || g.front().f_high < g.back().f_low;
  j["monotone_degrading"] = monotone;
  j["all_physical"] = physical;
  return j;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

void write_json(const std::filesystem::path& file, const ordered_json& j) { write_text(file, j.dump(2) + "\n"); }

bool drift_free(const DeviceParameters& p) {
  return p.drift.heating_amplitude1 == 0.0 && p.drift.heating_amplitude2 == 0.0 && p.drift.walk_sigma == 0.0 &&
         p.drift.exchange_drift_rate == 0.0;
}

// ---------------------------------------------------------------------------

struct Run {
  const ExperimentConfig& c;
  RunSummary out;

  void artifact(const std::string& name) { out.artifacts.push_back(name); }
  std::filesystem::path path(const char* name) const { return out.directory / name; }

  std::vector<MeasurementRecord> irb_records(std::uint64_t seed, const std::string& prefix, ContextState& ctx,
                                             const FeedbackSettings& fb, long context_base,
                                             std::vector<FeedbackEvent>* events) {
    const auto jobs = irb_jobs(c.irb, seed, prefix);
    return execute_jobs(c.device, jobs, c.irb.shots, ctx, fb, derive_seed(seed, 4), context_base, events);
  }

  void irb(bool with_fbt) {
    ContextState ctx = ContextState::initial(c.device);
    const auto records = irb_records(derive_seed(c.seed, 1), "", ctx, c.feedback, 0, nullptr);
    write_records(path(artifact::kRecords), records);
    artifact(artifact::kRecords);
    const IrbResult r = analyse_irb(records, c.irb, "", derive_seed(c.seed, 2));
    out.report["irb"] = irb_json(r);
    out.unphysical = r.unphysical;
    if (!with_fbt) return;
    const auto snaps = run_fbt(c, records, derive_seed(c.seed, 3));
    write_json(path(artifact::kTrace), trace_json(snaps));
    artifact(artifact::kTrace);
    out.report["fbt"] = trace_summary(snaps, entangler_kind(c.irb.entangler));
  }

  void drift_demo() {
    ContextState ctx = ContextState::initial(c.device);
    std::vector<MeasurementRecord> all;
    auto& runs = out.report["runs"] = ordered_json::array();
    int flagged = 0;
    for (int k = 0; k < c.runs; ++k) {
      const std::string prefix = "run" + std::to_string(k) + ":";
      const std::uint64_t seed = derive_seed(c.seed, 100 + static_cast<std::uint64_t>(k));
      const auto records = irb_records(seed, prefix, ctx, c.feedback, k, nullptr);
      const IrbResult r = analyse_irb(records, c.irb, prefix, derive_seed(seed, 2));
      ordered_json j = irb_json(r);
      j["run"] = k;
      runs.push_back(j);
      flagged += r.unphysical ? 1 : 0;
      all.insert(all.end(), records.begin(), records.end());
    }
    write_records(path(artifact::kRecords), all);
    artifact(artifact::kRecords);
    out.report["unphysical_runs"] = flagged;
    out.unphysical = flagged > 0;
    const auto snaps = run_fbt(c, all, derive_seed(c.seed, 3));
    write_json(path(artifact::kTrace), trace_json(snaps));
    artifact(artifact::kTrace);
    out.report["fbt"] = trace_summary(snaps, entangler_kind(c.irb.entangler));
  }

  void feedback_demo() {
    FeedbackSettings none;
    FeedbackSettings fb = c.feedback;
    if (fb.cadence == 0) fb.cadence = 50;
    const std::uint64_t seed = derive_seed(c.seed, 1);

    ContextState control_ctx = ContextState::initial(c.device);
    const auto control = irb_records(seed, "", control_ctx, none, 0, nullptr);
    write_records(out.directory / "records_control.jsonl", control);
    artifact("records_control.jsonl");

    ContextState ctx = ContextState::initial(c.device);
    std::vector<FeedbackEvent> events;
    const auto records = irb_records(seed, "", ctx, fb, 0, &events);
    write_records(path(artifact::kRecords), records);
    artifact(artifact::kRecords);

    std::ostringstream csv;
    csv.precision(10);
    csv << "lab_time,success,detuning1,detuning2\n";
    for (const auto& e : events)
      csv << e.lab_time << ',' << (e.success ? 1 : 0) << ',' << e.detuning[0] << ',' << e.detuning[1] << '\n';
    write_text(path(artifact::kFeedback), csv.str());
    artifact(artifact::kFeedback);

    const IrbResult rc = analyse_irb(control, c.irb, "", derive_seed(c.seed, 2));
    const IrbResult rf = analyse_irb(records, c.irb, "", derive_seed(c.seed, 2));
    out.report["irb_control"] = irb_json(rc);
    out.report["irb"] = irb_json(rf);
    out.report["feedback_rounds"] = events.size();
    out.unphysical = rc.unphysical || rf.unphysical;
    const auto snaps = run_fbt(c, records, derive_seed(c.seed, 3));
    write_json(path(artifact::kTrace), trace_json(snaps));
    artifact(artifact::kTrace);
    out.report["fbt"] = trace_summary(snaps, entangler_kind(c.irb.entangler));
  }

  void gst() {
    const GstSettings& s = c.gst;
    const GSTDesign design = design_experiment(s.gates, s.max_depth, s.fiducials);
    EstimateOptions opts;
    opts.gauge = s.gauge;
    GSTEstimate est;
    if (s.shots == 0) {
      const ContextState ctx = ContextState::initial(c.device);
      GSTData data;
      data.circuits = design.circuits;
      data.frequency.assign(design.circuits.size(), 0.0);
      data.shots.assign(design.circuits.size(), 1e6);
      parallel_for(design.circuits.size(), [&](std::size_t i) {
        data.frequency[i] = expected_even_probability(c.device, design.circuits[i], ctx, {}, s.quadrature_nodes);
      });
      est = estimate(design, data, opts);
    } else {
      std::vector<Job> jobs;
      const std::uint64_t seed = derive_seed(c.seed, 1);
      for (std::size_t i = 0; i < design.circuits.size(); ++i)
        jobs.push_back({design.circuits[i], "gst", 0, false, derive_seed(seed, i)});
      ContextState ctx = ContextState::initial(c.device);
      const auto records = execute_jobs(c.device, jobs, s.shots, ctx, c.feedback, derive_seed(seed, 4));
      write_records(path(artifact::kRecords), records);
      artifact(artifact::kRecords);
      est = estimate(design, records, opts);
    }

    ordered_json g;
    g["circuits"] = design.circuits.size();
    g["prep_fiducials"] = design.prep_fiducials.size();
    g["meas_fiducials"] = design.meas_fiducials.size();
    g["germs"] = design.germs.size();
    g["depths"] = design.depths;
    g["prep_rank"] = design.prep_rank;
    g["meas_rank"] = design.meas_rank;
    g["iterations"] = est.iterations;
    g["converged"] = est.converged;
    g["mle_failed"] = est.mle_failed;
    g["deviance"] = est.deviance;
    g["log_likelihood"] = est.log_likelihood;
    auto& gates = g["gates"] = ordered_json::array();
    for (const auto& e : est.gates) {
      ordered_json j;
      j["gate"] = to_token(e.gate);
      j["average_fidelity"] = e.average_fidelity;
      j["marginal_fidelity"] = ordered_json::array();
      for (double m : e.marginal_fidelity) j["marginal_fidelity"].push_back(std::isfinite(m) ? ordered_json(m) : ordered_json());
      j["generator_defined"] = e.generator_defined;
      ordered_json h, st;
      for (int a = 1; a < 16; ++a) {
        const std::string label = PauliString(a).label();
        h[label] = e.generator.hamiltonian[static_cast<std::size_t>(a - 1)];
        st[label] = e.generator.stochastic[static_cast<std::size_t>(a - 1)];
      }
      j["hamiltonian"] = h;
      j["stochastic"] = st;
      gates.push_back(j);
    }
    TaxonomyOptions to;
    to.threshold = s.taxonomy_threshold;
    auto& tax = g["taxonomy"] = ordered_json::array();
    for (const auto& t : taxonomy_report(est, to)) {
      ordered_json j;
      j["gate"] = to_token(t.gate);
      j["category"] = category_name(t.category);
      j["type"] = std::string(1, t.type);
      j["pauli"] = t.pauli.label();
      j["value"] = t.value;
      j["attribution"] = t.attribution;
      tax.push_back(j);
    }
    write_json(path(artifact::kGst), g);
    artifact(artifact::kGst);

    ordered_json summary = ordered_json::array();
    for (const auto& e : g["gates"]) {
      ordered_json j;
      j["gate"] = e["gate"];
      j["average_fidelity"] = e["average_fidelity"];
      const double iz = std::abs(e["hamiltonian"]["IZ"].get<double>()) + std::abs(e["stochastic"]["IZ"].get<double>());
      const double zi = std::abs(e["hamiltonian"]["ZI"].get<double>()) + std::abs(e["stochastic"]["ZI"].get<double>());
      j["local_z_error"] = iz + zi;
      summary.push_back(j);
    }
    out.report["gst"] = {{"converged", est.converged}, {"deviance", est.deviance}, {"gates", summary}};
  }
};

}  // namespace

std::string_view kind_name(ExperimentKind kind) { return name_of(kKinds, kind); }

ExperimentKind kind_from_name(std::string_view name) {
  ExperimentKind k;
  if (!value_of(kKinds, name, k)) throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
  return k;
}

ExperimentConfig config_from_json(const json& j) {
  std::vector<std::string> errors;
  ExperimentConfig c;
  {
    Section top(j, "config", errors);
    std::string kind;
    if (top.string("kind", kind)) {
      if (!value_of(kKinds, kind, c.kind)) top.error("kind", "unknown experiment kind '" + kind + "'");
    } else if (j.is_object() && !j.contains("kind")) {
      top.error("kind", "missing");
    }
    if (const json* d = top.find("device")) c.device = device_from_json(*d, errors, "device");
    else if (j.is_object()) top.error("device", "missing");
    if (const json* v = top.find("seed")) {
      if (v->is_number_unsigned()) c.seed = v->get<std::uint64_t>();
      else if (v->is_number_integer() && v->get<long long>() >= 0) c.seed = static_cast<std::uint64_t>(v->get<long long>());
      else top.error("seed", "expected a non-negative integer");
    }
    std::string output;
    if (top.string("output", output)) {
      if (output.empty()) top.error("output", "must not be empty");
      c.output = output;
    }
    top.integer("runs", c.runs, 1, 10000);
    if (const json* v = top.find("irb")) read_irb(*v, c.irb, errors);
    if (const json* v = top.find("fbt")) read_fbt(*v, c.fbt, errors);
    if (const json* v = top.find("gst")) read_gst(*v, c.gst, errors);
    if (const json* v = top.find("feedback")) read_feedback(*v, c.feedback, errors);
  }
  if (!errors.empty()) {
    std::string msg = std::to_string(errors.size()) + " configuration error(s):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return config_from_json(j);
}

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["kind"] = kind_name(c.kind);
  j["seed"] = c.seed;
  j["output"] = c.output.string();
  j["runs"] = c.runs;
  j["device"] = device_to_json(c.device);
  j["irb"] = {{"lengths", c.irb.lengths},
              {"randomizations", c.irb.randomizations},
              {"shots", c.irb.shots},
              {"entangler", entangler_name(c.irb.entangler)},
              {"bootstrap_samples", c.irb.bootstrap_samples},
              {"shuffle", c.irb.shuffle},
              {"fix_asymptote", c.irb.fix_asymptote}};
  j["fbt"] = {{"prior_sigma", c.fbt.prior_sigma},
              {"relinearize", c.fbt.relinearize},
              {"window_circuits", c.fbt.window_circuits},
              {"reprior", c.fbt.reprior},
              {"inflation", c.fbt.inflation},
              {"samples", c.fbt.samples}};
  ordered_json gates = ordered_json::array();
  for (const auto& g : c.gst.gates) gates.push_back(to_token(g));
  j["gst"] = {{"gates", gates},
              {"max_depth", c.gst.max_depth},
              {"shots", c.gst.shots},
              {"quadrature_nodes", c.gst.quadrature_nodes},
              {"fiducials", name_of(kStrategies, c.gst.fiducials)},
              {"gauge", name_of(kGauges, c.gst.gauge)},
              {"taxonomy_threshold", c.gst.taxonomy_threshold}};
  j["feedback"] = {{"cadence", c.feedback.cadence}, {"probe_shots", c.feedback.probe_shots}};
  return j;
}

std::vector<MeasurementRecord> execute_jobs(const DeviceParameters& params, std::span<const Job> jobs, int shots,
                                            ContextState& context, const FeedbackSettings& feedback,
                                            std::uint64_t feedback_seed, long context_base,
                                            std::vector<FeedbackEvent>* events) {
  std::vector<MeasurementRecord> out(jobs.size());
  auto label = [&](std::size_t i, long epoch) {
    out[i].series = jobs[i].series;
    out[i].length = jobs[i].length;
    out[i].expected_odd = jobs[i].expected_odd;
    out[i].context_id = context_base + epoch;
  };

  if (feedback.cadence == 0 && drift_free(params)) {
    // Only lab time advances, so circuits are independent given their start time.
    std::vector<double> start(jobs.size());
    double lab = 0.0, mw = 0.0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const Circuit expanded = expand_composites(jobs[i].circuit);
      start[i] = context.lab_time + lab;
      lab += shots * (circuit_duration(params, expanded) + params.readout_time);
      mw += shots * circuit_mw_time(params, expanded);
    }
    parallel_for(jobs.size(), [&](std::size_t i) {
      ContextState local = context;
      local.lab_time = start[i];
      out[i] = run_circuit(params, jobs[i].circuit, shots, jobs[i].seed, local);
      label(i, 0);
    });
    Rng rng(feedback_seed);
    context = advance_context(context, params, mw, lab, rng);
    return out;
  }

  long epoch = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (feedback.cadence > 0 && i % static_cast<std::size_t>(feedback.cadence) == 0) {
      const FeedbackResult fr =
          apply_feedback(params, context, feedback.probe_shots, derive_seed(feedback_seed, static_cast<std::uint64_t>(epoch)));
      if (events) events->push_back({context.lab_time, fr.success, fr.estimated_detuning});
      context = fr.context;
      ++epoch;
    }
    out[i] = run_circuit(params, jobs[i].circuit, shots, jobs[i].seed, context);
    label(i, epoch);
  }
  return out;
}

std::vector<Job> irb_jobs(const IrbSettings& s, std::uint64_t seed, const std::string& prefix) {
  RBConfig rb;
  rb.lengths = s.lengths;
  rb.randomizations = s.randomizations;
  rb.shots = s.shots;
  rb.entangler = s.entangler;
  rb.seed = derive_seed(seed, 1);
  const auto reference = generate_rb_circuits(rb);
  rb.interleaved_gate = s.entangler;
  rb.seed = derive_seed(seed, 2);
  const auto interleaved = generate_rb_circuits(rb);

  std::vector<Job> jobs;
  jobs.reserve(reference.size() + interleaved.size());
  auto add = [&](const std::vector<RBCircuit>& circuits, const std::string& series, std::uint64_t stream) {
    const std::uint64_t base = derive_seed(seed, stream);
    for (std::size_t i = 0; i < circuits.size(); ++i)
      jobs.push_back({circuits[i].circuit, prefix + series, circuits[i].length, circuits[i].expected_odd,
                      derive_seed(base, i)});
  };
  add(reference, "reference", 11);
  add(interleaved, "interleaved", 12);
  if (s.shuffle) {
    Rng rng(derive_seed(seed, 13));
    std::shuffle(jobs.begin(), jobs.end(), rng);
  }
  return jobs;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  Run run{config, {}};
  run.out.directory = config.output;
  std::filesystem::create_directories(config.output);
  write_json(run.path(artifact::kConfig), config_to_json(config));
  run.artifact(artifact::kConfig);

  auto& report = run.out.report;
  report["kind"] = kind_name(config.kind);
  report["device"] = config.device.name;
  report["seed"] = config.seed;
  switch (config.kind) {
    case ExperimentKind::Irb: run.irb(false); break;
    case ExperimentKind::FbtOnIrb: run.irb(true); break;
    case ExperimentKind::Gst: run.gst(); break;
    case ExperimentKind::DriftDemo: run.drift_demo(); break;
    case ExperimentKind::FeedbackDemo: run.feedback_demo(); break;
  }
  report["flagged_unphysical"] = run.out.unphysical;
  write_json(run.path(artifact::kReport), report);
  run.artifact(artifact::kReport);
  write_text(run.path(artifact::kReportText), format_report(report));
  run.artifact(artifact::kReportText);
  return run.out;
}

namespace {

void irb_lines(std::ostringstream& os, const json& r, const std::string& title) {
  os << title << ": F_clifford " << r["f_clifford"].get<double>() << " +- " << r["f_clifford_sigma"].get<double>()
     << ", F_gate " << r["f_gate"].get<double>() << " +- " << r["f_gate_sigma"].get<double>() << " [95%: "
     << r["f_gate_low"].get<double>() << ", " << r["f_gate_high"].get<double>() << "]"
     << (r["unphysical"].get<bool>() ? "  ** UNPHYSICAL (F_gate > 1) **" : "") << "\n";
}

}  // namespace

std::string format_report(const json& report) {
  std::ostringstream os;
  os.precision(6);
  os << "experiment " << report.value("kind", "?") << " on device " << report.value("device", "?") << " (seed "
     << report.value("seed", 0ULL) << ")\n";
  if (report.contains("irb_control")) irb_lines(os, report["irb_control"], "IRB without feedback");
  if (report.contains("irb")) irb_lines(os, report["irb"], "IRB");
  if (report.contains("feedback_rounds")) os << "feedback rounds: " << report["feedback_rounds"].get<int>() << "\n";
  if (report.contains("runs")) {
    for (const auto& r : report["runs"]) irb_lines(os, r, "run " + std::to_string(r["run"].get<int>()));
    os << "unphysical runs: " << report["unphysical_runs"].get<int>() << " of " << report["runs"].size() << "\n";
  }
  if (report.contains("fbt")) {
    const auto& f = report["fbt"];
    os << "FBT " << f["gate"].get<std::string>() << ": " << f["windows"].get<int>() << " windows";
    if (f.contains("first_median"))
      os << ", median F " << f["first_median"].get<double>() << " -> " << f["last_median"].get<double>()
         << ", infidelity ratio " << f["infidelity_ratio"].get<double>()
         << (f["all_physical"].get<bool>() ? ", all windows physical" : ", UNPHYSICAL window");
    os << "\n";
  }
  if (report.contains("gst")) {
    const auto& g = report["gst"];
    os << "GST " << (g["converged"].get<bool>() ? "converged" : "not converged") << ", deviance "
       << g["deviance"].get<double>() << "\n";
    for (const auto& e : g["gates"])
      os << "  " << e["gate"].get<std::string>() << ": F_avg " << e["average_fidelity"].get<double>()
         << ", |IZ|+|ZI| (h + s) " << e["local_z_error"].get<double>() << "\n";
  }
  if (report.value("flagged_unphysical", false)) os << "result flagged: unphysical fidelity estimate\n";
  return os.str();
}

}  // namespace spincv
