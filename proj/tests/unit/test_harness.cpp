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
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "spincv/common/errors.hpp"
#include "spincv/common/seed.hpp"
#include "spincv/harness/experiment.hpp"
#include "spincv/harness/plots.hpp"
#include "spincv/harness/records.hpp"

using namespace spincv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spincv_test_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  return rows;
}

std::vector<double> csv_numbers(const std::string& row) {
  std::vector<double> out;
  std::istringstream in(row);
  for (std::string cell; std::getline(in, cell, ',');) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::invalid_argument&) {
      out.push_back(std::nan(""));
    }
  }
  return out;
}

MeasurementRecord random_record(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 8), len(0, 12), shots(1, 1000);
  std::uniform_real_distribution<double> angle(-10.0, 10.0), time(0.0, 1e4);
  MeasurementRecord r;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    const auto kind = static_cast<GateKind>(pick(rng));
    if (kind == GateKind::VZ1) r.circuit.push_back(PrimitiveGate::vz1(angle(rng)));
    else if (kind == GateKind::VZ2) r.circuit.push_back(PrimitiveGate::vz2(angle(rng)));
    else if (kind == GateKind::Idle) r.circuit.push_back(PrimitiveGate::idle(time(rng) * 1e-9));
    else r.circuit.push_back(PrimitiveGate::of(kind));
  }
  r.shots = shots(rng);
  r.even_count = std::uniform_int_distribution<int>(0, r.shots)(rng);
  r.odd_count = r.shots - r.even_count;
  r.lab_time = time(rng) / 3.0;
  r.context_id = len(rng);
  r.series = n % 2 ? "reference" : "run7:interleaved";
  r.length = len(rng);
  r.expected_odd = n % 3 == 0;
  return r;
}

ExperimentConfig small_irb(const fs::path& out, const std::string& preset) {
  ExperimentConfig c;
  c.kind = ExperimentKind::Irb;
  c.device = device_preset(preset);
  c.irb.lengths = {1, 3, 8};
  c.irb.randomizations = 6;
  c.irb.shots = 20;
  c.irb.bootstrap_samples = 20;
  c.seed = 11;
  c.output = out;
  return c;
}

}  // namespace

TEST_CASE("record lines round-trip exactly") {
  std::mt19937_64 rng(5);
  std::vector<MeasurementRecord> records;
  for (int i = 0; i < 300; ++i) records.push_back(random_record(rng));
  const std::string text = records_to_jsonl(records);
  CHECK(parse_records(text) == records);
  CHECK(std::count(text.begin(), text.end(), '\n') == 300);

  const fs::path file = scratch("records.jsonl");
  write_records(file, records);
  CHECK(read_records(file) == records);
  fs::remove(file);

  // Stable field order.
  const std::string line = record_line(records.front());
  std::vector<std::size_t> pos;
  for (const char* key : {"\"circuit\"", "\"shots\"", "\"even_count\"", "\"odd_count\"", "\"lab_time\"",
                          "\"context_id\"", "\"series\"", "\"length\"", "\"expected_odd\""})
    pos.push_back(line.find(key));
  CHECK(std::is_sorted(pos.begin(), pos.end()));
  CHECK(pos.front() != std::string::npos);
}

TEST_CASE("malformed record lines are rejected with their line number") {
  MeasurementRecord r;
  r.circuit = {PrimitiveGate::of(GateKind::CZ)};
  r.shots = 10;
  r.even_count = 4;
  r.odd_count = 6;
  const std::string good = record_line(r);
  CHECK(parse_records(good + "\n\n" + good + "\n").size() == 2);
  auto message = [](const std::string& text) {
    try {
      parse_records(text);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(good + "\n{\"circuit\": [\"CZ\"]}\n").find("line 2") != std::string::npos);
  CHECK(message(good + "\n" + good + "\nnot json\n").find("line 3") != std::string::npos);
  std::string mismatch = good;
  mismatch.replace(mismatch.find("\"odd_count\":6"), 13, "\"odd_count\":5");
  CHECK(message(mismatch).find("shots") != std::string::npos);
  std::string bad_gate = good;
  bad_gate.replace(bad_gate.find("\"CZ\""), 4, "\"CNOT\"");
  CHECK(message(bad_gate).find("CNOT") != std::string::npos);
}

TEST_CASE("config parsing lists every violation") {
  const auto ok = nlohmann::json::parse(R"({"kind": "gst", "device": {"preset": "B"}, "seed": 4,
      "gst": {"gates": ["X1", "X2", "CZ"], "max_depth": 2, "fiducials": "projection", "gauge": "unitary"}})");
  const ExperimentConfig c = config_from_json(ok);
  CHECK(c.kind == ExperimentKind::Gst);
  CHECK(c.seed == 4);
  CHECK(c.gst.gates.size() == 3);
  CHECK(c.gst.fiducials == FiducialStrategy::SingleQubitProjection);
  CHECK(c.gst.gauge == GaugeGroup::Unitary);
  CHECK(c.device.t2star1 == device_preset("B").t2star1);

  // Resolved config round-trips.
  const ExperimentConfig again = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
  CHECK(config_to_json(again) == config_to_json(c));

  const auto bad = nlohmann::json::parse(R"({"kind": "tomography", "device": {"preset": "B", "rabi1": -1},
      "seed": -3, "colour": 1,
      "irb": {"lengths": [4, 2], "randomizations": 1, "entangler": "CNOT", "shufle": true},
      "fbt": {"prior_sigma": "wide", "inflation": 0.5},
      "gst": {"gates": ["X1", "Q7"], "fiducials": "magic"},
      "feedback": {"cadence": -1}})");
  std::string message;
  try {
    config_from_json(bad);
  } catch (const ConfigError& e) {
    message = e.what();
  }
  for (const char* expected : {"config.kind", "device", "rabi1", "config.seed", "config.colour", "irb.lengths",
                               "irb.randomizations", "irb.entangler", "irb.shufle", "fbt.prior_sigma",
                               "fbt.inflation", "gst.gates", "gst.fiducials", "feedback.cadence"}) {
    INFO(expected);
    CHECK(message.find(expected) != std::string::npos);
  }
  CHECK(message.find("13 configuration error") != std::string::npos);

  std::string missing;
  try {
    config_from_json(nlohmann::json::parse("{}"));
  } catch (const ConfigError& e) {
    missing = e.what();
  }
  CHECK(missing.find("config.kind: missing") != std::string::npos);
  CHECK(missing.find("config.device: missing") != std::string::npos);
  CHECK_THROWS_AS(kind_from_name("rb"), ConfigError);
  for (auto k : {ExperimentKind::Irb, ExperimentKind::FbtOnIrb, ExperimentKind::Gst, ExperimentKind::DriftDemo,
                 ExperimentKind::FeedbackDemo})
    CHECK(kind_from_name(kind_name(k)) == k);
}

TEST_CASE("parallel execution matches a sequential loop and prefixes are stable") {
  const DeviceParameters p = device_preset("C");
  IrbSettings s;
  s.lengths = {1, 4};
  s.randomizations = 5;
  s.shots = 30;
  const auto jobs = irb_jobs(s, 77);
  REQUIRE(jobs.size() == 20);

  ContextState ctx = ContextState::initial(p);
  const auto parallel = execute_jobs(p, jobs, s.shots, ctx, {}, 1);

  ContextState seq = ContextState::initial(p);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const MeasurementRecord r = run_circuit(p, jobs[i].circuit, s.shots, jobs[i].seed, seq);
    CHECK(r.even_count == parallel[i].even_count);
    CHECK(std::abs(r.lab_time - parallel[i].lab_time) < 1e-12);
    CHECK(parallel[i].series == jobs[i].series);
    CHECK(parallel[i].expected_odd == jobs[i].expected_odd);
  }
  CHECK(std::abs(seq.lab_time - ctx.lab_time) < 1e-9);

  // Adding circuits never perturbs earlier ones.
  ContextState c2 = ContextState::initial(p);
  const auto prefix = execute_jobs(p, std::span<const Job>(jobs).first(7), s.shots, c2, {}, 1);
  for (std::size_t i = 0; i < prefix.size(); ++i) CHECK(prefix[i] == parallel[i]);

  s.shuffle = true;
  const auto shuffled = irb_jobs(s, 77);
  CHECK(shuffled.size() == jobs.size());
  bool moved = false;
  for (std::size_t i = 0; i < jobs.size(); ++i) moved = moved || shuffled[i].seed != jobs[i].seed;
  CHECK(moved);
}

TEST_CASE("feedback rounds advance the context id") {
  DeviceParameters p = device_preset("C");
  p.drift.walk_sigma = 1000.0;
  IrbSettings s;
  s.lengths = {1, 2};
  s.randomizations = 3;
  s.shots = 10;
  const auto jobs = irb_jobs(s, 5);
  ContextState ctx = ContextState::initial(p);
  std::vector<FeedbackEvent> events;
  const auto records = execute_jobs(p, jobs, s.shots, ctx, {4, 50}, 9, 100, &events);
  CHECK(events.size() == 3);
  CHECK(records.front().context_id == 101);
  CHECK(records.back().context_id == 103);
  for (std::size_t i = 1; i < records.size(); ++i) CHECK(records[i].lab_time > records[i - 1].lab_time);
}

TEST_CASE("same config and seed give byte-identical records") {
  for (const char* preset : {"C", "drift-demo"}) {
    INFO(preset);
    const fs::path a = scratch(std::string("det_a_") + preset), b = scratch(std::string("det_b_") + preset);
    const auto ra = run_experiment(small_irb(a, preset));
    const auto rb = run_experiment(small_irb(b, preset));
    const std::string first = slurp(a / artifact::kRecords);
    CHECK(!first.empty());
    CHECK(first == slurp(b / artifact::kRecords));
    CHECK(slurp(a / artifact::kReport) == slurp(b / artifact::kReport));
    auto other = small_irb(b, preset);
    other.seed = 12;
    run_experiment(other);
    CHECK(first != slurp(b / artifact::kRecords));
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("plot data from an fbt-on-irb run") {
  const fs::path dir = scratch("plots");
  CHECK_THROWS_WITH_AS(emit_plot_data(dir, PlotKind::Decay), doctest::Contains("records.jsonl"), ArtifactError);

  ExperimentConfig c = small_irb(dir, "C");
  c.kind = ExperimentKind::FbtOnIrb;
  c.irb.shuffle = true;
  c.fbt.window_circuits = 12;
  c.fbt.samples = 40;
  const RunSummary run = run_experiment(c);
  CHECK(fs::exists(dir / artifact::kTrace));
  CHECK(fs::exists(dir / artifact::kReportText));
  CHECK(run.report.contains("fbt"));

  const auto decay = csv_rows(slurp(emit_plot_data(dir, PlotKind::Decay)));
  CHECK(decay.front() == "length,mean_survival,stderr,series");
  CHECK(decay.size() == 1 + 2 * c.irb.lengths.size());

  const auto trace = csv_rows(slurp(emit_plot_data(dir, PlotKind::Trace)));
  CHECK(trace.front() == "lab_time,gate,F_median,F_low,F_high");
  CHECK(trace.size() == 1 + 3 * 3);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const auto v = csv_numbers(trace[i]);
    CHECK(v[3] <= v[2]);
    CHECK(v[2] <= v[4]);
    CHECK(v[4] <= 1.0);
  }

  CHECK_THROWS_WITH_AS(emit_plot_data(dir, PlotKind::Taxonomy), doctest::Contains("gst_report.json"), ArtifactError);
  fs::remove_all(dir);
}

TEST_CASE("exchange plot spans four decades over 0.4 V") {
  const fs::path dir = scratch("exchange");
  fs::create_directories(dir);
  ExperimentConfig c;
  c.device = device_preset("A");
  c.device.j_slope = 10.0;
  c.device.v_range = 0.4;
  std::ofstream(dir / artifact::kConfig) << config_to_json(c).dump(2);
  const auto rows = csv_rows(plot_csv(dir, PlotKind::Exchange));
  CHECK(rows.front() == "voltage,J");
  const auto first = csv_numbers(rows[1]), last = csv_numbers(rows.back());
  CHECK(first[0] == 0.0);
  CHECK(last[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(last[1] / first[1] == doctest::Approx(1e4).epsilon(1e-9));
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(csv_numbers(rows[i])[1] > csv_numbers(rows[i - 1])[1]);
  CHECK_THROWS_AS(plot_from_name("histogram"), ValidationError);
  fs::remove_all(dir);
}

TEST_CASE("gst run writes a taxonomy") {
  const fs::path dir = scratch("gst");
  ExperimentConfig c;
  c.kind = ExperimentKind::Gst;
  c.device = device_preset("A");
  c.gst.gates = {PrimitiveGate::of(GateKind::X1_90), PrimitiveGate::of(GateKind::X2_90),
                 PrimitiveGate::of(GateKind::CZ)};
  c.gst.quadrature_nodes = 3;
  c.output = dir;
  const RunSummary run = run_experiment(c);
  CHECK(run.report["gst"]["gates"].size() == 3);
  const auto rows = csv_rows(plot_csv(dir, PlotKind::Taxonomy));
  CHECK(rows.front() == "gate,category,pauli,h,s");
  CHECK(rows.size() > 1);
  bool stark = false;
  for (const auto& r : rows) stark = stark || r.starts_with("CZ,physical,");
  CHECK(stark);
  fs::remove_all(dir);
}
