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

// Two-photon optical test bench. A downconversion source plus heralding
// prepares a tunable single-photon polarization mixture; waveplates set
// the preparation and measurement bases; a polarizing beam splitter
// acts as a CNOT from polarization onto a path ancilla, realizing a
// non-demolition nonselective measurement. Two such stages in sequence
// give the joint statistics of both measurement orders, from which the
// incompatibility quantifier is computed, optionally with multinomial
// shot noise and a bootstrap error bar.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tici/errors.hpp"
#include "tici/incompat.hpp"
#include "tici/linalg.hpp"
#include "tici/measurements.hpp"
#include "tici/rng.hpp"
#include "tici/states.hpp"

namespace tici {

inline constexpr double kCircuitUnitaryTol = 1e-10;
inline constexpr std::size_t kBootstrapResamples = 200;

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A waveplate dial position. HWP angles are fast-axis angles, QWP
// angles are retardation phases; both act with period pi.
struct WaveplateSetting {
  enum class Kind { HWP, QWP };

  Kind kind = Kind::HWP;
  double angle = 0.0;

  // The same setting reduced into [0, pi).
  double canonical() const {
    const double pi = 3.14159265358979323846;
    double a = std::fmod(angle, pi);
    if (a < 0.0) a += pi;
    return a;
  }
};

// [[cos 2t, sin 2t], [sin 2t, -cos 2t]]; unitary, Hermitian, and equal
// to the Bloch observable (sin 4t, 0, cos 4t) . sigma at angle 2t.
inline Matrix hwp_unitary(double theta) {
  Matrix u(2, 2);
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  u << c, s, s, -c;
  return u;
}

// diag(1, e^{i phi}).
inline Matrix qwp_unitary(double phi) {
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = Complex(std::cos(phi), std::sin(phi));
  return u;
}

// Polarizing beam splitter on polarization (tensor) path, in the basis
// {H, V} x {0, 1}: H passes straight through, V switches path.
inline Matrix pbs_cnot() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(2, 3) = 1.0;
  u(3, 2) = 1.0;
  return u;
}

// Downconverted photon pair cos(2 theta_p)|HH> + sin(2 theta_p) e^{i
// delta}|VV>. The relative phase drops out of every heralded quantity
// downstream; it is kept as a knob for completeness.
inline Vector spdc_state(double theta_p, double delta = 0.0) {
  Vector psi = Vector::Zero(4);
  psi(0) = std::cos(2.0 * theta_p);
  psi(3) = Complex(std::cos(delta), std::sin(delta)) * std::sin(2.0 * theta_p);
  return psi;
}

// Single-photon state after tracing out the partner photon:
// (p/2) I + (1 - p)|H><H| with p = 1 - cos(4 theta_p).
inline DensityMatrix heralded_state(double theta_p, double delta = 0.0) {
  const DensityMatrix pair(projector(spdc_state(theta_p, delta)));
  return DensityMatrix(partial_trace(pair.mat(), {2, 2}, Subsystem::First));
}

// Heralded state steered through HWP(theta1) then QWP(phi1). Equals the
// two-parameter mixture with p = 1 - cos(4 theta_p), polar angle
// 4 theta1, and azimuth phi1.
inline DensityMatrix prepare_state(double theta_p, double theta1, double phi1,
                                   double delta = 0.0) {
  const Matrix u = (qwp_unitary(phi1) * hwp_unitary(theta1)).eval();
  const Matrix rho = heralded_state(theta_p, delta).mat();
  return DensityMatrix((u * rho * u.adjoint()).eval());
}

// Measurement selected by an HWP dial: the Bloch direction
// (sin 4t, 0, cos 4t), so t = 0 reads sigma_z and t = pi/8 reads
// sigma_x. The half-angle variant (sin 2t, 0, cos 2t) is kept for
// comparison, default off.
inline ProjectiveMeasurement angle_to_observable(double theta, bool half_angle_map = false) {
  const double bloch_angle = (half_angle_map ? 2.0 : 4.0) * theta;
  const Matrix obs =
      (std::sin(bloch_angle) * pauli_x() + std::cos(bloch_angle) * pauli_z()).eval();
  return projective_from_observable(obs);
}

// Ordered unitary elements on the polarization (tensor) path register.
class OpticalCircuit {
 public:
  explicit OpticalCircuit(std::vector<Matrix> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw ValidationError("OpticalCircuit: no elements");
    dim_ = elements_.front().rows();
    for (const Matrix& e : elements_) {
      detail::require_square(e, "OpticalCircuit element");
      if (e.rows() != dim_) {
        throw DimensionError("OpticalCircuit: elements act on different register sizes");
      }
      if (schatten2_norm((e.adjoint() * e - Matrix::Identity(dim_, dim_)).eval()) >
          kCircuitUnitaryTol) {
        throw ValidationError("OpticalCircuit: element is not unitary");
      }
    }
  }

  Eigen::Index dim() const { return dim_; }
  const std::vector<Matrix>& elements() const { return elements_; }

  // Product of all elements, first element acting first.
  Matrix unitary() const {
    Matrix u = Matrix::Identity(dim_, dim_);
    for (const Matrix& e : elements_) u = (e * u).eval();
    return u;
  }

 private:
  std::vector<Matrix> elements_;
  Eigen::Index dim_ = 0;
};

namespace detail {

// Unit vector spanning a rank-1 projector, up to phase.
inline Vector principal_vector(const Matrix& p) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < p.cols(); ++k) {
    if (p(k, k).real() > p(best, best).real()) best = k;
  }
  return p.col(best).normalized();
}

// Basis-change unitary of a qubit measurement, columns ordered so the
// outcome with the larger label maps to path 0 / |0>.
inline Matrix rotation_from_measurement(const ProjectiveMeasurement& m) {
  if (m.dim() != 2 || m.outcomes() != 2) {
    throw DimensionError("nondemolition circuit: expected a two-outcome qubit measurement");
  }
  Matrix r(2, 2);
  r.col(0) = principal_vector(m.projector(1));
  r.col(1) = principal_vector(m.projector(0));
  return r;
}

}  // namespace detail

// Non-demolition realization of a nonselective qubit measurement:
// rotate the measurement basis onto {H, V}, copy onto a fresh path
// ancilla with the beam splitter, rotate back. Tracing out the ancilla
// reproduces the nonselective channel exactly.
inline OpticalCircuit nondemolition_circuit(const ProjectiveMeasurement& m) {
  const Matrix r = detail::rotation_from_measurement(m);
  const Matrix id = identity2();
  std::vector<Matrix> elements;
  elements.push_back(kron(r.adjoint().eval(), id));
  elements.push_back(pbs_cnot());
  elements.push_back(kron(r, id));
  return OpticalCircuit(std::move(elements));
}

struct ExperimentConfig {
  double theta_p = 0.0;  // pump HWP: mixing parameter p = 1 - cos(4 theta_p)
  double theta1 = 0.0;   // preparation HWP
  double phi1 = 0.0;     // preparation QWP phase
  double theta_a = 0.0;  // first observable HWP
  double theta_b = 0.0;  // second observable HWP
  std::optional<std::uint64_t> counts_per_setting;
  std::uint64_t seed = 0;
  double spdc_phase = 0.0;
  bool half_angle_map = false;
};

// Shot-noise view of one experiment: multinomial counts per measurement
// order, the statistics they induce, and a bootstrap error bar.
struct CountsSample {
  CountMatrix counts_ab;  // rows: first-observable outcomes, A measured first
  CountMatrix counts_ba;  // rows: second-observable outcomes, B measured first
  std::uint64_t counts_per_setting = 0;
  ContextStatistics empirical;
  ContextReport report;
  double standard_error = 0.0;        // bootstrap spread of the estimate
  std::size_t finite_resamples = 0;   // resamples with a finite estimate
};

struct CountsRecord {
  RealMatrix joint_ab;  // P(a_i, b_j) with A measured first; ascending labels
  RealMatrix joint_ba;  // P(b_j, a_i) with B measured first
  ContextStatistics statistics;
  ContextReport report;
  std::optional<CountsSample> sample;
};

namespace detail {

// Joint outcome distribution of measuring `first` then `second` on one
// photon, using the full three-qubit register polarization (tensor)
// path1 (tensor) path2. Stage one copies the first observable onto
// path1 and restores the basis; stage two rotates the second
// observable onto {H, V} and copies it onto path2, leaving polarization
// to be detected directly (the trailing rotation is omitted). Row i is
// the i-th outcome of `first`, column j of `second`, both in ascending
// label order.
inline RealMatrix order_joint(const DensityMatrix& prep, const ProjectiveMeasurement& first,
                              const ProjectiveMeasurement& second) {
  const Matrix r_f = rotation_from_measurement(first);
  const Matrix r_s = rotation_from_measurement(second);
  const Matrix id2 = identity2();
  const Matrix id4 = Matrix::Identity(4, 4);

  const Matrix stage1 =
      kron((kron(r_f, id2) * pbs_cnot() * kron(r_f.adjoint().eval(), id2)).eval(), id2);
  const Matrix rotate2 = kron(r_s.adjoint().eval(), id4);
  const Matrix p0 = projector(basis_ket(2, 0));
  const Matrix p1 = projector(basis_ket(2, 1));
  const Matrix copy2 = (kron(p0, id4) + kron(p1, kron(id2, pauli_x()))).eval();

  const Matrix u = (copy2 * rotate2 * stage1).eval();
  const Matrix rho_in = kron(prep.mat(), kron(p0, p0));
  const Matrix rho_out = (u * rho_in * u.adjoint()).eval();

  // Path 1 holds the first outcome, polarization the second; register
  // value k corresponds to outcome index 1 - k (larger label on H/0).
  RealMatrix joint(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Matrix proj =
          kron(projector(basis_ket(2, 1 - j)), kron(projector(basis_ket(2, 1 - i)), id2));
      joint(i, j) = (rho_out * proj).trace().real();
    }
  }
  return joint;
}

inline std::vector<double> scaled_row_sums(const RealMatrix& m, double scale) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m.row(i).sum() * scale;
  return out;
}

inline std::vector<double> scaled_col_sums(const RealMatrix& m, double scale) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(j)] = m.col(j).sum() * scale;
  return out;
}

// The four context distributions induced by the two joint tables.
inline ContextStatistics joint_statistics(const RealMatrix& joint_ab, const RealMatrix& joint_ba,
                                          const std::vector<double>& a_labels,
                                          const std::vector<double>& b_labels, double scale) {
  return ContextStatistics{
      OutcomeDistribution(scaled_row_sums(joint_ab, scale), a_labels),
      OutcomeDistribution(scaled_col_sums(joint_ba, scale), a_labels),
      OutcomeDistribution(scaled_row_sums(joint_ba, scale), b_labels),
      OutcomeDistribution(scaled_col_sums(joint_ab, scale), b_labels),
  };
}

// Sequential-binomial multinomial sampler over the table cells.
inline CountMatrix multinomial_counts(const RealMatrix& probs, std::uint64_t n, Rng& rng) {
  CountMatrix counts = CountMatrix::Zero(probs.rows(), probs.cols());
  std::uint64_t remaining = n;
  double rest = 1.0;
  const Eigen::Index cells = probs.size();
  for (Eigen::Index k = 0; k < cells && remaining > 0; ++k) {
    const Eigen::Index i = k / probs.cols();
    const Eigen::Index j = k % probs.cols();
    if (k == cells - 1) {
      counts(i, j) = static_cast<std::int64_t>(remaining);
      remaining = 0;
      break;
    }
    const double p = probs(i, j);
    std::uint64_t draw = 0;
    if (rest > 0.0 && p > 0.0) {
      const double ratio = std::min(1.0, p / rest);
      std::binomial_distribution<std::uint64_t> binomial(remaining, ratio);
      draw = binomial(rng.engine());
    }
    counts(i, j) = static_cast<std::int64_t>(draw);
    remaining -= draw;
    rest = std::max(0.0, rest - p);
  }
  return counts;
}

}  // namespace detail

// Draws multinomial counts for both measurement orders, recomputes the
// quantifier from the empirical frequencies, and attaches a bootstrap
// standard error over the resamples whose estimate is finite.
// Deterministic for a fixed seed.
inline CountsRecord sample_counts(const CountsRecord& record, std::uint64_t n, std::uint64_t seed,
                                  double base = 2.0) {
  if (n < 1) throw DomainError("sample_counts: need at least one count per setting");
  const std::vector<double>& a_labels = record.statistics.x_before.labels();
  const std::vector<double>& b_labels = record.statistics.y_before.labels();

  Rng rng(seed);
  CountMatrix counts_ab = detail::multinomial_counts(record.joint_ab, n, rng);
  CountMatrix counts_ba = detail::multinomial_counts(record.joint_ba, n, rng);

  const double inv_n = 1.0 / static_cast<double>(n);
  const RealMatrix freq_ab = counts_ab.cast<double>() * inv_n;
  const RealMatrix freq_ba = counts_ba.cast<double>() * inv_n;
  ContextStatistics empirical =
      detail::joint_statistics(freq_ab, freq_ba, a_labels, b_labels, 1.0);
  const ContextReport estimate = tici_distributions(empirical, base);

  double sum = 0.0, sum_sq = 0.0;
  std::size_t finite = 0;
  for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
    const RealMatrix re_ab =
        detail::multinomial_counts(freq_ab, n, rng).cast<double>() * inv_n;
    const RealMatrix re_ba =
        detail::multinomial_counts(freq_ba, n, rng).cast<double>() * inv_n;
    const ContextReport resampled =
        tici_distributions(detail::joint_statistics(re_ab, re_ba, a_labels, b_labels, 1.0), base);
    if (resampled.tici.infinite) continue;
    sum += resampled.tici.value;
    sum_sq += resampled.tici.value * resampled.tici.value;
    ++finite;
  }
  double standard_error = 0.0;
  if (finite >= 2) {
    const double mean = sum / static_cast<double>(finite);
    const double var =
        std::max(0.0, (sum_sq - static_cast<double>(finite) * mean * mean) /
                          (static_cast<double>(finite) - 1.0));
    standard_error = std::sqrt(var);
  }

  CountsRecord out = record;
  out.sample = CountsSample{std::move(counts_ab), std::move(counts_ba),     n,
                            std::move(empirical), estimate, standard_error, finite};
  return out;
}

// Full pipeline: heralded preparation, then the two-stage
// non-demolition circuit in both measurement orders, then the
// quantifier on the induced statistics. With counts_per_setting set,
// shot-noise sampling is chained on the exact record.
inline CountsRecord simulate_experiment(const ExperimentConfig& cfg, double base = 2.0) {
  if (cfg.counts_per_setting && *cfg.counts_per_setting < 1) {
    throw ValidationError("simulate_experiment: counts_per_setting must be at least 1");
  }
  const ProjectiveMeasurement a = angle_to_observable(cfg.theta_a, cfg.half_angle_map);
  const ProjectiveMeasurement b = angle_to_observable(cfg.theta_b, cfg.half_angle_map);
  const DensityMatrix prep = prepare_state(cfg.theta_p, cfg.theta1, cfg.phi1, cfg.spdc_phase);

  RealMatrix joint_ab = detail::order_joint(prep, a, b);
  RealMatrix joint_ba = detail::order_joint(prep, b, a);
  for (const RealMatrix* joint : {&joint_ab, &joint_ba}) {
    if (std::abs(joint->sum() - 1.0) > 1e-9) {
      throw InvariantError("simulate_experiment: joint probabilities sum to " +
                           std::to_string(joint->sum()));
    }
  }
  ContextStatistics stats =
      detail::joint_statistics(joint_ab, joint_ba, a.labels(), b.labels(), 1.0);
  const ContextReport report = tici_distributions(stats, base);
  CountsRecord record{std::move(joint_ab), std::move(joint_ba), std::move(stats), report,
                      std::nullopt};

  if (cfg.counts_per_setting) {
    return sample_counts(record, *cfg.counts_per_setting, cfg.seed, base);
  }
  return record;
}

}  // namespace tici
