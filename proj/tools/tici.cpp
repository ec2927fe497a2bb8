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

// Command line front end. Exit codes: 0 success, 2 configuration or
// usage error, 3 numerical invariant violation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tici/config.hpp"
#include "tici/errors.hpp"
#include "tici/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct CliOptions {
  std::string config_path;
  std::string axis = "x";
  double p_value = 0.0;
  std::size_t steps = 33;
  std::size_t samples = 100000;
  std::size_t tables = 1000;
  std::int64_t dim = 2;
  std::uint64_t seed = 0;
  std::int64_t counts = 0;
  double base = 2.0;
  std::string format = "csv";
  std::string out_path;
  double theta_p = 0.0;
  double theta1 = 0.0;
  double phi1 = 0.0;
  double theta_a = std::numbers::pi / 8.0;
  double theta_b = 0.0;
};

std::string read_text_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    throw tici::ConfigError("cannot read config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

tici::OutputFormat parse_format(const std::string& name) {
  if (name == "csv") {
    return tici::OutputFormat::Csv;
  }
  if (name == "json") {
    return tici::OutputFormat::Json;
  }
  throw tici::ConfigError("format must be csv or json, got '" + name + "'");
}

// Flags shared by every subcommand override whatever the mode (or the
// config file) would otherwise choose, but only when actually given.
void apply_overrides(tici::SweepSpec& spec, const CliOptions& opts, const CLI::App* sub) {
  if (sub->count("--counts") > 0) {
    if (opts.counts < 1) {
      throw tici::ConfigError("counts must be at least 1, got " + std::to_string(opts.counts));
    }
    spec.counts_per_setting = static_cast<std::uint64_t>(opts.counts);
  }
  if (sub->count("--base") > 0) {
    if (!(opts.base > 1.0)) {
      throw tici::ConfigError("base must exceed 1, got " +
                              tici::detail::format_number(opts.base));
    }
    spec.base = opts.base;
  }
  if (sub->count("--format") > 0) {
    spec.format = parse_format(opts.format);
  }
  if (sub->count("--out") > 0) {
    spec.out_path = opts.out_path;
  }
  if (sub->count("--seed") > 0) {
    spec.seed = opts.seed;
  }
}

void add_shared_options(CLI::App* sub, CliOptions& opts) {
  sub->add_option("--counts", opts.counts,
                  "Counts per measurement setting; adds sampled estimates with bootstrap error "
                  "bars");
  sub->add_option("--base", opts.base, "Logarithm base for all divergences (default 2)");
  sub->add_option("--format", opts.format, "Output format: csv or json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", opts.out_path, "Output file path (default: stdout)");
  sub->add_option("--seed", opts.seed, "Master seed for all derived randomness (default 0)");
}

int run_spec(tici::SweepSpec spec) {
  for (const std::string& warning : spec.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  const std::vector<tici::SweepRow> rows = tici::run_sweep(spec);
  tici::emit_figure_data(rows, spec.format, spec.out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Context incompatibility toolkit: exact and finite-counts evaluation of the polarization "
      "interferometer model, plus batch diagnostics."};
  app.require_subcommand(1);
  CliOptions opts;

  CLI::App* run = app.add_subcommand("run", "Evaluate a config file (one mode table)");
  run->add_option("config", opts.config_path, "Path to config file")->required();
  add_shared_options(run, opts);

  CLI::App* fig3 = app.add_subcommand(
      "fig3", "Sweep the pump angle theta_p in [0, pi/4] for a fixed preparation axis");
  fig3->add_option("--axis", opts.axis, "Preparation axis: x, y or z (default x)")
      ->check(CLI::IsMember({"x", "y", "z"}));
  fig3->add_option("--steps", opts.steps, "Grid points, at least 2 (default 33)");
  add_shared_options(fig3, opts);

  CLI::App* fig4 = app.add_subcommand(
      "fig4", "Sweep the observable angle theta_A in [0, pi/4] at fixed mixing p");
  fig4->add_option("--p", opts.p_value,
                   "Preparation mixing parameter in [0,2]; 0, 1 and 2 are the reference panels");
  fig4->add_option("--steps", opts.steps, "Grid points, at least 2 (default 33)");
  add_shared_options(fig4, opts);

  CLI::App* max_search =
      app.add_subcommand("max-search", "Randomized search for the largest incompatibility");
  max_search->add_option("--samples", opts.samples, "Random contexts to draw (default 100000)");
  max_search->add_option("--dim", opts.dim, "Hilbert space dimension, 2 through 8 (default 2)");
  add_shared_options(max_search, opts);

  CLI::App* classical = app.add_subcommand(
      "classical-check", "Verify random classical joint tables are exactly compatible");
  classical->add_option("--tables", opts.tables, "Random tables to draw (default 1000)");
  add_shared_options(classical, opts);

  CLI::App* single =
      app.add_subcommand("single", "Evaluate one explicit circuit configuration");
  single->add_option("--theta-p", opts.theta_p, "Pump waveplate angle in radians (default 0)");
  single->add_option("--theta1", opts.theta1,
                     "Preparation half waveplate angle in radians (default 0)");
  single->add_option("--phi1", opts.phi1, "Preparation quarter waveplate phase (default 0)");
  single->add_option("--theta-a", opts.theta_a,
                     "First observable waveplate angle (default pi/8)");
  single->add_option("--theta-b", opts.theta_b, "Second observable waveplate angle (default 0)");
  add_shared_options(single, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    tici::SweepSpec spec;
    if (run->parsed()) {
      spec = tici::validate_config(read_text_file(opts.config_path));
      apply_overrides(spec, opts, run);
      return run_spec(std::move(spec));
    }
    if (fig3->parsed()) {
      spec.mode = tici::SweepMode::Fig3;
      spec.axis = opts.axis[0];
      spec.steps = opts.steps;
      apply_overrides(spec, opts, fig3);
      return run_spec(std::move(spec));
    }
    if (fig4->parsed()) {
      spec.mode = tici::SweepMode::Fig4;
      spec.p_value = opts.p_value;
      spec.steps = opts.steps;
      apply_overrides(spec, opts, fig4);
      return run_spec(std::move(spec));
    }
    if (max_search->parsed()) {
      spec.mode = tici::SweepMode::MaxSearch;
      spec.samples = opts.samples;
      if (opts.dim < 2 || opts.dim > 8) {
        throw tici::ConfigError("dim = " + std::to_string(opts.dim) +
                                " out of range; dim ∈ [2,8]");
      }
      spec.dim = static_cast<Eigen::Index>(opts.dim);
      apply_overrides(spec, opts, max_search);
      return run_spec(std::move(spec));
    }
    if (classical->parsed()) {
      spec.mode = tici::SweepMode::ClassicalCheck;
      spec.tables = opts.tables;
      apply_overrides(spec, opts, classical);
      return run_spec(std::move(spec));
    }
    spec.mode = tici::SweepMode::Single;
    spec.theta_p = opts.theta_p;
    spec.theta1 = opts.theta1;
    spec.phi1 = opts.phi1;
    spec.theta_a = opts.theta_a;
    spec.theta_b = opts.theta_b;
    apply_overrides(spec, opts, single);
    return run_spec(std::move(spec));
  } catch (const tici::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tici::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
}
