// Copyright 2026 The tici developers
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

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tici/errors.hpp"
#include "tici/incompat.hpp"
#include "tici/optics.hpp"
#include "tici/sweep.hpp"

namespace {

using tici::DivergenceValue;
using tici::OutputFormat;
using tici::SweepMode;
using tici::SweepRow;
using tici::SweepSpec;

constexpr double kPi = std::numbers::pi;

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) {
    h -= p * std::log2(p);
  }
  if (p < 1.0) {
    h -= (1.0 - p) * std::log2(1.0 - p);
  }
  return h;
}

// Exact curve for the swept-pump family with an x (or z) axis
// preparation: half the complement of the binary entropy of the pure
// fraction.
double pump_sweep_closed_form(double theta_p) {
  const double p = 1.0 - std::cos(4.0 * theta_p);
  return 0.5 * (1.0 - binary_entropy(0.5 * p));
}

// Exact curve for the swept-observable family on the pure preparation
// poles.
double observable_sweep_closed_form(double theta_a) {
  const double c = std::cos(2.0 * theta_a);
  const double s = std::sin(2.0 * theta_a);
  const double overlap = c * c * c * c + s * s * s * s;
  return -0.5 * std::log2(overlap);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream stream(path, std::ios::binary);
  REQUIRE(stream.good());
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("pump sweep along x reproduces the closed form", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig3;
  const std::vector<SweepRow> rows = tici::run_sweep(spec);
  REQUIRE(rows.size() == 33);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SweepRow& row = rows[k];
    CHECK(row.mode == SweepMode::Fig3);
    CHECK(row.sweep_param == "theta_p");
    REQUIRE(row.value.has_value());
    REQUIRE(row.theta_p.has_value());
    CHECK(*row.value == *row.theta_p);
    REQUIRE(row.p.has_value());
    CHECK_THAT(*row.p, Catch::Matchers::WithinAbs(1.0 - std::cos(4.0 * *row.theta_p), 1e-12));
    REQUIRE(row.theta_a.has_value());
    CHECK_THAT(*row.theta_a, Catch::Matchers::WithinAbs(kPi / 8.0, 1e-15));
    REQUIRE_FALSE(row.i_value.infinite);
    CHECK_THAT(row.i_value.value,
               Catch::Matchers::WithinAbs(pump_sweep_closed_form(*row.theta_p), 1e-10));
    CHECK_FALSE(row.i_sampled.has_value());
    CHECK_FALSE(row.i_stderr.has_value());
    REQUIRE(row.term_forward.has_value());
    REQUIRE(row.term_backward.has_value());
  }
  CHECK_THAT(rows.front().i_value.value, Catch::Matchers::WithinAbs(0.5, 1e-10));
  CHECK_THAT(rows.back().i_value.value, Catch::Matchers::WithinAbs(0.5, 1e-10));
  CHECK(rows[16].i_value.value <= 1e-12);
}

TEST_CASE("pump sweep along y vanishes identically", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig3;
  spec.axis = 'y';
  for (const SweepRow& row : tici::run_sweep(spec)) {
    REQUIRE_FALSE(row.i_value.infinite);
    CHECK(row.i_value.value <= 1e-12);
  }
}

TEST_CASE("observable sweep reproduces the closed form on the poles", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig4;
  for (const double p : {0.0, 2.0}) {
    spec.p_value = p;
    const std::vector<SweepRow> rows = tici::run_sweep(spec);
    REQUIRE(rows.size() == 33);
    for (const SweepRow& row : rows) {
      CHECK(row.sweep_param == "theta_A");
      REQUIRE(row.value.has_value());
      REQUIRE(row.theta_a.has_value());
      CHECK(*row.value == *row.theta_a);
      REQUIRE(row.p.has_value());
      CHECK(*row.p == p);
      CHECK_THAT(row.i_value.value,
                 Catch::Matchers::WithinAbs(observable_sweep_closed_form(*row.theta_a), 1e-10));
    }
    CHECK(rows.front().i_value.value <= 1e-12);
    CHECK(rows.back().i_value.value <= 1e-12);
    CHECK_THAT(rows[16].i_value.value, Catch::Matchers::WithinAbs(0.5, 1e-10));
  }
}

TEST_CASE("observable sweep at p = 1 vanishes identically", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig4;
  spec.p_value = 1.0;
  for (const SweepRow& row : tici::run_sweep(spec)) {
    CHECK(row.i_value.value <= 1e-12);
  }
}

TEST_CASE("single mode emits exactly the simulated report", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Single;
  spec.theta_p = 0.1;
  spec.theta1 = kPi / 8.0;
  spec.phi1 = 0.2;
  spec.theta_a = kPi / 8.0;
  spec.theta_b = 0.05;
  const std::vector<SweepRow> rows = tici::run_sweep(spec);
  REQUIRE(rows.size() == 1);
  const SweepRow& row = rows.front();
  CHECK(row.sweep_param == "none");
  CHECK_FALSE(row.value.has_value());

  const tici::ExperimentConfig cfg{spec.theta_p, spec.theta1, spec.phi1,
                                   spec.theta_a, spec.theta_b, std::nullopt,
                                   0,            0.0,          false};
  const tici::CountsRecord record = tici::simulate_experiment(cfg);
  CHECK(row.i_value.value == record.report.tici.value);
  REQUIRE(row.term_forward.has_value());
  CHECK(row.term_forward->value == record.report.term_forward.value);
}

TEST_CASE("max-search mode summarizes the randomized search", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::MaxSearch;
  spec.samples = 300;
  spec.seed = 7;
  const std::vector<SweepRow> rows = tici::run_sweep(spec);
  REQUIRE(rows.size() == 1);
  CHECK(rows.front().sweep_param == "samples");
  REQUIRE(rows.front().value.has_value());
  CHECK(*rows.front().value == 300.0);
  const tici::MaxSearchResult direct = tici::random_context_max_search(300, 7);
  CHECK(rows.front().i_value.value == direct.max_tici);
  CHECK_FALSE(rows.front().p.has_value());
  CHECK_FALSE(rows.front().i_sampled.has_value());
}

TEST_CASE("classical-check mode emits only zeros", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::ClassicalCheck;
  spec.tables = 60;
  spec.seed = 11;
  const std::vector<SweepRow> rows = tici::run_sweep(spec);
  REQUIRE(rows.size() == 60);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    CHECK(rows[t].sweep_param == "table");
    REQUIRE(rows[t].value.has_value());
    CHECK(*rows[t].value == static_cast<double>(t));
    REQUIRE_FALSE(rows[t].i_value.infinite);
    CHECK(rows[t].i_value.value <= 1e-12);
  }
}

TEST_CASE("sampled sweeps are deterministic in the master seed", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig3;
  spec.steps = 5;
  spec.counts_per_setting = 2000;
  spec.seed = 31;
  const std::vector<SweepRow> first = tici::run_sweep(spec);
  const std::vector<SweepRow> second = tici::run_sweep(spec);
  REQUIRE(first.size() == second.size());
  bool any_nonzero = false;
  for (std::size_t k = 0; k < first.size(); ++k) {
    REQUIRE(first[k].i_sampled.has_value());
    REQUIRE(first[k].i_stderr.has_value());
    CHECK(first[k].i_sampled->value == second[k].i_sampled->value);
    CHECK(*first[k].i_stderr == *second[k].i_stderr);
    any_nonzero = any_nonzero || first[k].i_sampled->value != 0.0;
  }
  CHECK(any_nonzero);

  spec.seed = 32;
  const std::vector<SweepRow> other = tici::run_sweep(spec);
  bool all_equal = true;
  for (std::size_t k = 0; k < first.size(); ++k) {
    all_equal = all_equal && first[k].i_sampled->value == other[k].i_sampled->value;
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("sweeps respect a non-default logarithm base", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig3;
  spec.steps = 9;
  spec.base = std::exp(1.0);
  const std::vector<SweepRow> rows = tici::run_sweep(spec);
  const double cap = 0.5 * std::log(2.0);
  for (const SweepRow& row : rows) {
    CHECK(row.i_value.value <= cap + 1e-9);
  }
  CHECK_THAT(rows.front().i_value.value, Catch::Matchers::WithinAbs(cap, 1e-10));
}

TEST_CASE("invalid sweep specs raise config errors", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig3;
  spec.steps = 1;
  CHECK_THROWS_AS(tici::run_sweep(spec), tici::ConfigError);
  spec.steps = 33;
  spec.stop = spec.start;
  CHECK_THROWS_AS(tici::run_sweep(spec), tici::ConfigError);
  spec.stop = kPi / 4.0;
  spec.axis = 'q';
  CHECK_THROWS_AS(tici::run_sweep(spec), tici::ConfigError);

  SweepSpec fig4;
  fig4.mode = SweepMode::Fig4;
  fig4.p_value = 2.5;
  CHECK_THROWS_AS(tici::run_sweep(fig4), tici::ConfigError);

  SweepSpec bad_base;
  bad_base.mode = SweepMode::Single;
  bad_base.base = 1.0;
  CHECK_THROWS_AS(tici::run_sweep(bad_base), tici::ConfigError);
}

TEST_CASE("csv rendering pins the header and cell layout", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig3;
  spec.steps = 3;
  const std::vector<SweepRow> rows = tici::run_sweep(spec);
  const std::string text = tici::render_figure_data(rows, OutputFormat::Csv);
  std::istringstream lines(text);
  std::string header;
  REQUIRE(std::getline(lines, header));
  CHECK(header ==
        "mode,sweep_param,value,p,theta_p,theta_A,I_bits,term_forward,term_backward,I_sampled,"
        "I_stderr");
  std::string first_row;
  REQUIRE(std::getline(lines, first_row));
  std::vector<std::string> cells;
  std::istringstream splitter(first_row);
  std::string cell;
  while (std::getline(splitter, cell, ',')) {
    cells.push_back(cell);
  }
  cells.resize(11);
  CHECK(cells[0] == "fig3");
  CHECK(cells[1] == "theta_p");
  CHECK(cells[2] == "0");
  CHECK(cells[3] == "0");
  CHECK(cells[4] == "0");
  CHECK(cells[5] == "0.392699081699");
  CHECK_THAT(std::stod(cells[6]), Catch::Matchers::WithinAbs(0.5, 1e-10));
  CHECK(cells[9].empty());
  CHECK(cells[10].empty());
  std::size_t body_rows = 1;
  std::string line;
  while (std::getline(lines, line)) {
    ++body_rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 10);
  }
  CHECK(body_rows == 3);

  CHECK(tici::render_figure_data(rows, OutputFormat::Csv) == text);
}

TEST_CASE("csv rendering marks divergent entries as inf", "[sweep]") {
  SweepRow row;
  row.mode = SweepMode::Single;
  row.sweep_param = "none";
  row.i_value = DivergenceValue::infinity();
  const std::string text = tici::render_figure_data({row}, OutputFormat::Csv);
  CHECK(text.find("single,none,,,,,inf,,,,\n") != std::string::npos);
}

TEST_CASE("json rendering mirrors the csv fields", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig3;
  spec.steps = 3;
  spec.counts_per_setting = 400;
  const std::vector<SweepRow> rows = tici::run_sweep(spec);
  const std::string text = tici::render_figure_data(rows, OutputFormat::Json);
  const nlohmann::json doc = nlohmann::json::parse(text);
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 3);
  const nlohmann::json& first = doc[0];
  CHECK(first.at("mode") == "fig3");
  CHECK(first.at("sweep_param") == "theta_p");
  CHECK(first.at("value").get<double>() == 0.0);
  CHECK(first.at("theta_A").get<double>() > 0.0);
  CHECK(first.at("I_bits").get<double>() == 0.5);
  CHECK(first.at("term_forward").is_number());
  CHECK(first.at("I_sampled").is_number());
  CHECK(first.at("I_stderr").is_number());

  SweepRow bare;
  bare.mode = SweepMode::Single;
  bare.sweep_param = "none";
  bare.i_value = DivergenceValue::infinity();
  const nlohmann::json single = nlohmann::json::parse(
      tici::render_figure_data({bare}, OutputFormat::Json));
  CHECK(single[0].at("I_bits") == "inf");
  CHECK(single[0].at("value").is_null());
  CHECK(single[0].at("I_sampled").is_null());
}

TEST_CASE("empty tables refuse to render or emit", "[sweep]") {
  CHECK_THROWS_AS(tici::render_figure_data({}, OutputFormat::Csv), tici::ValidationError);
  const std::filesystem::path target =
      std::filesystem::temp_directory_path() / "tici_empty_table.csv";
  std::filesystem::remove(target);
  CHECK_THROWS_AS(tici::emit_figure_data({}, OutputFormat::Csv, target.string()),
                  tici::ValidationError);
  CHECK_FALSE(std::filesystem::exists(target));
}

TEST_CASE("emitted files match the rendered text byte for byte", "[sweep]") {
  SweepSpec spec;
  spec.mode = SweepMode::Fig4;
  spec.p_value = 2.0;
  spec.steps = 5;
  const std::vector<SweepRow> rows = tici::run_sweep(spec);
  const std::filesystem::path target =
      std::filesystem::temp_directory_path() / "tici_sweep_roundtrip.csv";
  tici::emit_figure_data(rows, OutputFormat::Csv, target.string());
  CHECK(read_file(target) == tici::render_figure_data(rows, OutputFormat::Csv));
  std::filesystem::remove(target);

  CHECK_THROWS_AS(
      tici::emit_figure_data(rows, OutputFormat::Csv, "/nonexistent-dir/tici_out.csv"),
      tici::ConfigError);
}
