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

#pragma once

// Parameter sweeps over the optical simulation plus the two batch
// diagnostics (randomized incompatibility search, classical zero
// check), and serialization of the resulting table to CSV or JSON.
// One row per grid point; rows carry the exact incompatibility, both
// divergence terms, and optionally a finite-counts estimate with a
// bootstrap error bar.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tici/classical.hpp"
#include "tici/errors.hpp"
#include "tici/incompat.hpp"
#include "tici/optics.hpp"
#include "tici/rng.hpp"

namespace tici {

// Slack on the d = 2 upper bound (1/2) log_b 2 when auditing emitted
// values.
inline constexpr double kSweepBoundSlack = 1e-9;

// Tolerance for the classical zero check: every random joint table
// must come out compatible to this accuracy.
inline constexpr double kClassicalZeroTol = 1e-12;

enum class SweepMode { Fig3, Fig4, MaxSearch, ClassicalCheck, Single };

enum class OutputFormat { Csv, Json };

inline const char* mode_name(SweepMode mode) {
  switch (mode) {
    case SweepMode::Fig3:
      return "fig3";
    case SweepMode::Fig4:
      return "fig4";
    case SweepMode::MaxSearch:
      return "max-search";
    case SweepMode::ClassicalCheck:
      return "classical-check";
    case SweepMode::Single:
      return "single";
  }
  throw DomainError("mode_name: unknown sweep mode");
}

// Fully resolved run description. validate_config fills one of these
// from a config file; the CLI fills it from flags. Fields not used by
// the selected mode keep their defaults and are ignored.
struct SweepSpec {
  SweepMode mode = SweepMode::Single;

  // Swept range. fig3 sweeps the pump angle theta_p, fig4 sweeps the
  // first observable angle theta_A. Both default to [0, pi/4].
  double start = 0.0;
  double stop = std::numbers::pi / 4.0;
  std::size_t steps = 33;

  // fig3: preparation axis for the swept family ("x", "y" or "z").
  char axis = 'x';
  // fig4: mixing parameter of the fixed preparation, p in [0, 2].
  double p_value = 0.0;

  // single: explicit circuit settings.
  double theta_p = 0.0;
  double theta1 = 0.0;
  double phi1 = 0.0;

  // Observable waveplate angles. fig4 overrides theta_a with the swept
  // value.
  double theta_a = std::numbers::pi / 8.0;
  double theta_b = 0.0;

  double spdc_phase = 0.0;
  bool half_angle_map = false;

  // max-search: number of random contexts and Hilbert dimension.
  std::size_t samples = 100000;
  Eigen::Index dim = 2;

  // classical-check: number of random joint tables.
  std::size_t tables = 1000;

  double base = 2.0;
  std::optional<std::uint64_t> counts_per_setting;
  std::uint64_t seed = 0;

  OutputFormat format = OutputFormat::Csv;
  // Empty path means stdout.
  std::string out_path;

  // Non-fatal validation notes, printed by the CLI.
  std::vector<std::string> warnings;
};

// One output row. Optional fields render as empty CSV cells / JSON
// null when a column does not apply to the mode.
struct SweepRow {
  SweepMode mode = SweepMode::Single;
  std::string sweep_param;
  std::optional<double> value;
  std::optional<double> p;
  std::optional<double> theta_p;
  std::optional<double> theta_a;
  DivergenceValue i_value;
  std::optional<DivergenceValue> term_forward;
  std::optional<DivergenceValue> term_backward;
  std::optional<DivergenceValue> i_sampled;
  std::optional<double> i_stderr;
};

namespace detail {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

// Audits one exact value against [0, (1/2) log_b 2]. The simulation
// only ever produces qubit contexts here, so anything outside the
// band is a numerical defect, not physics.
inline void check_qubit_bound(const DivergenceValue& v, double base) {
  if (v.infinite) {
    throw InvariantError("run_sweep: exact incompatibility diverged on a qubit sweep point");
  }
  const double cap = 0.5 * std::log(2.0) / std::log(base) + kSweepBoundSlack;
  if (v.value < 0.0 || v.value > cap) {
    throw InvariantError("run_sweep: incompatibility " + format_number(v.value) +
                         " outside [0, " + format_number(cap) + "]");
  }
}

inline SweepRow optical_row(SweepMode mode, std::string sweep_param, double value,
                            const ExperimentConfig& cfg, double base) {
  const CountsRecord record = simulate_experiment(cfg, base);
  SweepRow row;
  row.mode = mode;
  row.sweep_param = std::move(sweep_param);
  row.value = value;
  row.p = 1.0 - std::cos(4.0 * cfg.theta_p);
  row.theta_p = cfg.theta_p;
  row.theta_a = cfg.theta_a;
  row.i_value = record.report.tici;
  row.term_forward = record.report.term_forward;
  row.term_backward = record.report.term_backward;
  if (record.sample.has_value()) {
    row.i_sampled = record.sample->report.tici;
    row.i_stderr = record.sample->standard_error;
  }
  check_qubit_bound(row.i_value, base);
  return row;
}

// Preparation waveplates for the three swept-axis families: the pure
// end of the interpolated state sits on the named Bloch axis.
inline std::pair<double, double> axis_preparation(char axis) {
  switch (axis) {
    case 'x':
      return {std::numbers::pi / 8.0, 0.0};
    case 'y':
      return {std::numbers::pi / 8.0, std::numbers::pi / 2.0};
    case 'z':
      return {0.0, 0.0};
    default:
      throw ConfigError(std::string("axis must be one of x, y, z; got '") + axis + "'");
  }
}

inline void require_sweep_range(const SweepSpec& spec) {
  if (spec.steps < 2) {
    throw ConfigError("steps must be at least 2, got " + std::to_string(spec.steps));
  }
  if (!(spec.stop > spec.start)) {
    throw ConfigError("stop must exceed start");
  }
}

}  // namespace detail

// Evaluates the run described by spec and returns one row per grid
// point (or per table / one summary row for the batch modes). All
// randomness is derived from spec.seed, so equal specs give equal
// tables.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (!(spec.base > 1.0)) {
    throw ConfigError("base must exceed 1, got " + std::to_string(spec.base));
  }
  std::vector<SweepRow> rows;
  switch (spec.mode) {
    case SweepMode::Fig3: {
      detail::require_sweep_range(spec);
      const auto [theta1, phi1] = detail::axis_preparation(spec.axis);
      rows.reserve(spec.steps);
      for (std::size_t k = 0; k < spec.steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(spec.steps - 1);
        const double theta_p = spec.start + (spec.stop - spec.start) * t;
        ExperimentConfig cfg{theta_p,      theta1,
                             phi1,         spec.theta_a,
                             spec.theta_b, spec.counts_per_setting,
                             derive_seed(spec.seed, k), spec.spdc_phase,
                             spec.half_angle_map};
        rows.push_back(detail::optical_row(spec.mode, "theta_p", theta_p, cfg, spec.base));
      }
      break;
    }
    case SweepMode::Fig4: {
      detail::require_sweep_range(spec);
      if (spec.p_value < 0.0 || spec.p_value > 2.0) {
        throw ConfigError("p = " + detail::format_number(spec.p_value) +
                          " out of range; p ∈ [0,2]");
      }
      const double theta_p = std::acos(1.0 - spec.p_value) / 4.0;
      rows.reserve(spec.steps);
      for (std::size_t k = 0; k < spec.steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(spec.steps - 1);
        const double theta_a = spec.start + (spec.stop - spec.start) * t;
        ExperimentConfig cfg{theta_p,      0.0,
                             0.0,          theta_a,
                             spec.theta_b, spec.counts_per_setting,
                             derive_seed(spec.seed, k), spec.spdc_phase,
                             spec.half_angle_map};
        rows.push_back(detail::optical_row(spec.mode, "theta_A", theta_a, cfg, spec.base));
        rows.back().p = spec.p_value;
      }
      break;
    }
    case SweepMode::Single: {
      ExperimentConfig cfg{spec.theta_p, spec.theta1,
                           spec.phi1,    spec.theta_a,
                           spec.theta_b, spec.counts_per_setting,
                           derive_seed(spec.seed, 0), spec.spdc_phase,
                           spec.half_angle_map};
      rows.push_back(detail::optical_row(spec.mode, "none", 0.0, cfg, spec.base));
      rows.back().value.reset();
      break;
    }
    case SweepMode::MaxSearch: {
      if (spec.samples < 1) {
        throw ConfigError("samples must be at least 1");
      }
      const MaxSearchResult found =
          random_context_max_search(spec.samples, spec.seed, spec.dim, spec.base);
      SweepRow row;
      row.mode = spec.mode;
      row.sweep_param = "samples";
      row.value = static_cast<double>(spec.samples);
      row.i_value = DivergenceValue::finite(found.max_tici);
      rows.push_back(std::move(row));
      break;
    }
    case SweepMode::ClassicalCheck: {
      if (spec.tables < 1) {
        throw ConfigError("tables must be at least 1");
      }
      rows.reserve(spec.tables);
      for (std::size_t t = 0; t < spec.tables; ++t) {
        Rng rng(derive_seed(spec.seed, t));
        const Eigen::Index nr = static_cast<Eigen::Index>(2 + rng.next_u64() % 5);
        const Eigen::Index nc = static_cast<Eigen::Index>(2 + rng.next_u64() % 5);
        const JointDistribution joint = random_joint(nr, nc, rng);
        const ContextReport report = classical_compat_check(joint, spec.base);
        if (report.tici.infinite || report.tici.value > kClassicalZeroTol) {
          throw InvariantError("run_sweep: classical table " + std::to_string(t) +
                               " produced nonzero incompatibility");
        }
        SweepRow row;
        row.mode = spec.mode;
        row.sweep_param = "table";
        row.value = static_cast<double>(t);
        row.i_value = report.tici;
        row.term_forward = report.term_forward;
        row.term_backward = report.term_backward;
        rows.push_back(std::move(row));
      }
      break;
    }
  }
  return rows;
}

namespace detail {

inline std::string csv_cell(const std::optional<double>& v) {
  return v.has_value() ? format_number(*v) : std::string();
}

inline std::string csv_cell(const std::optional<DivergenceValue>& v) {
  if (!v.has_value()) {
    return std::string();
  }
  return v->infinite ? std::string("inf") : format_number(v->value);
}

inline std::string json_cell(const std::optional<double>& v) {
  return v.has_value() ? format_number(*v) : std::string("null");
}

inline std::string json_cell(const std::optional<DivergenceValue>& v) {
  if (!v.has_value()) {
    return std::string("null");
  }
  return v->infinite ? std::string("\"inf\"") : format_number(v->value);
}

}  // namespace detail

// Column order is fixed; downstream plotting scripts key on these
// names.
inline constexpr const char* kFigureHeader =
    "mode,sweep_param,value,p,theta_p,theta_A,I_bits,term_forward,term_backward,I_sampled,"
    "I_stderr";

// Serializes rows without touching the filesystem. Numbers use 12
// significant digits with '.' as the decimal separator in both
// formats, so a fixed spec and seed reproduce the output byte for
// byte.
inline std::string render_figure_data(const std::vector<SweepRow>& rows, OutputFormat format) {
  if (rows.empty()) {
    throw ValidationError("render_figure_data: empty table");
  }
  std::string out;
  if (format == OutputFormat::Csv) {
    out += kFigureHeader;
    out += '\n';
    for (const SweepRow& row : rows) {
      out += mode_name(row.mode);
      out += ',';
      out += row.sweep_param;
      out += ',';
      out += detail::csv_cell(row.value);
      out += ',';
      out += detail::csv_cell(row.p);
      out += ',';
      out += detail::csv_cell(row.theta_p);
      out += ',';
      out += detail::csv_cell(row.theta_a);
      out += ',';
      out += detail::csv_cell(std::optional<DivergenceValue>(row.i_value));
      out += ',';
      out += detail::csv_cell(row.term_forward);
      out += ',';
      out += detail::csv_cell(row.term_backward);
      out += ',';
      out += detail::csv_cell(row.i_sampled);
      out += ',';
      out += detail::csv_cell(row.i_stderr);
      out += '\n';
    }
    return out;
  }
  out += "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& row = rows[i];
    out += "  {\"mode\": \"";
    out += mode_name(row.mode);
    out += "\", \"sweep_param\": \"";
    out += row.sweep_param;
    out += "\", \"value\": " + detail::json_cell(row.value);
    out += ", \"p\": " + detail::json_cell(row.p);
    out += ", \"theta_p\": " + detail::json_cell(row.theta_p);
    out += ", \"theta_A\": " + detail::json_cell(row.theta_a);
    out += ", \"I_bits\": " + detail::json_cell(std::optional<DivergenceValue>(row.i_value));
    out += ", \"term_forward\": " + detail::json_cell(row.term_forward);
    out += ", \"term_backward\": " + detail::json_cell(row.term_backward);
    out += ", \"I_sampled\": " + detail::json_cell(row.i_sampled);
    out += ", \"I_stderr\": " + detail::json_cell(row.i_stderr);
    out += i + 1 < rows.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

// Writes the rendered table to path, or to stdout when path is empty.
// An empty table errors before any file is created.
inline void emit_figure_data(const std::vector<SweepRow>& rows, OutputFormat format,
                             const std::string& path) {
  const std::string text = render_figure_data(rows, format);
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream) {
    throw ConfigError("cannot open output path '" + path + "' for writing");
  }
  stream << text;
  stream.flush();
  if (!stream) {
    throw ConfigError("failed while writing output path '" + path + "'");
  }
}

}  // namespace tici
