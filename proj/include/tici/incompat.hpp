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

// Context incompatibility quantifiers. A context pairs a preparation
// with two measurements; it is compatible when measuring either
// observable nonselectively leaves the other's statistics untouched.
// The quantifier averages the two Kullback-Leibler divergences between
// undisturbed and disturbed statistics (equivalently, for projective
// quantum measurements, the two von Neumann relative entropies between
// once- and twice-measured states). It is zero exactly on compatible
// contexts and capped at (1/2) log d for rank-1 projective qudit
// contexts.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "tici/errors.hpp"
#include "tici/linalg.hpp"
#include "tici/measurements.hpp"
#include "tici/rng.hpp"
#include "tici/states.hpp"

namespace tici {

// Residual threshold below which a context counts as compatible.
inline constexpr double kCompatibilityEps = 1e-10;

// Probabilities at or below this are treated as zero support.
inline constexpr double kProbFloor = 1e-14;

// Relative-entropy weights above this on a zero-support eigenvector
// signal a genuine support violation (divergence is infinite).
inline constexpr double kWeightFloor = 1e-12;

// Divergences are nonnegative; float error up to this magnitude is
// clamped to zero, anything worse is a broken invariant.
inline constexpr double kNegativeDivergenceTol = 1e-9;

// Nonnegative divergence in units of log base b, or the distinguished
// infinite value for support violations.
struct DivergenceValue {
  double value = 0.0;
  bool infinite = false;

  static DivergenceValue finite(double v) { return {v, false}; }
  static DivergenceValue infinity() { return {0.0, true}; }
};

struct ContextReport {
  DivergenceValue tici;           // (term_forward + term_backward) / 2
  DivergenceValue term_forward;   // divergence of the X statistics
  DivergenceValue term_backward;  // divergence of the Y statistics
  bool compatible = false;        // tici <= epsilon and finite
  double base = 2.0;
};

// The four distributions entering the quantifier: each variable's
// statistics before any measurement and after a nonselective
// measurement of the other variable.
struct ContextStatistics {
  OutcomeDistribution x_before;
  OutcomeDistribution x_after_y;
  OutcomeDistribution y_before;
  OutcomeDistribution y_after_x;
};

namespace detail {

inline void check_base(double base, const char* who) {
  if (!(base > 1.0)) {
    throw DomainError(std::string(who) + ": log base must exceed 1, got " + std::to_string(base));
  }
}

inline double clamp_divergence(double v, const char* who) {
  if (v < -kNegativeDivergenceTol) {
    throw InvariantError(std::string(who) + ": divergence " + std::to_string(v) +
                         " is negative beyond tolerance");
  }
  return v < 0.0 ? 0.0 : v;
}

inline ContextReport assemble_report(DivergenceValue forward, DivergenceValue backward,
                                     double base, double epsilon) {
  ContextReport report;
  report.term_forward = forward;
  report.term_backward = backward;
  report.base = base;
  if (forward.infinite || backward.infinite) {
    report.tici = DivergenceValue::infinity();
    report.compatible = false;
  } else {
    report.tici = DivergenceValue::finite(0.5 * (forward.value + backward.value));
    report.compatible = report.tici.value <= epsilon;
  }
  return report;
}

}  // namespace detail

// D(p || q) = sum_i p_i log(p_i / q_i), with 0 log 0 = 0 and the
// infinite value whenever p puts mass where q has none.
inline DivergenceValue kl_divergence(const OutcomeDistribution& p, const OutcomeDistribution& q,
                                     double base = 2.0) {
  detail::check_base(base, "kl_divergence");
  if (p.size() != q.size()) {
    throw ValidationError("kl_divergence: distributions have different lengths");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::abs(p.labels()[i] - q.labels()[i]) > 1e-9) {
      throw ValidationError("kl_divergence: outcome labels do not match at index " +
                            std::to_string(i));
    }
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.probs()[i];
    if (pi <= kProbFloor) continue;
    const double qi = q.probs()[i];
    if (qi <= kProbFloor) return DivergenceValue::infinity();
    acc += pi * std::log(pi / qi);
  }
  return DivergenceValue::finite(
      detail::clamp_divergence(acc / std::log(base), "kl_divergence"));
}

// S(rho || sigma) = Tr[rho (log rho - log sigma)] via the two
// eigendecompositions; infinite when rho's support leaks outside
// sigma's. Coincides with kl_divergence of the spectra when the states
// commute.
inline DivergenceValue quantum_relative_entropy(const DensityMatrix& rho,
                                                const DensityMatrix& sigma, double base = 2.0) {
  detail::check_base(base, "quantum_relative_entropy");
  if (rho.dim() != sigma.dim()) {
    throw DimensionError("quantum_relative_entropy: state dims differ");
  }
  const HermitianEig rho_eig = hermitian_eig(rho.mat());
  const HermitianEig sigma_eig = hermitian_eig(sigma.mat());

  double rho_log_rho = 0.0;
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    const double lambda = rho_eig.eigenvalues(i);
    if (lambda > kProbFloor) rho_log_rho += lambda * std::log(lambda);
  }

  double rho_log_sigma = 0.0;
  for (Eigen::Index j = 0; j < sigma.dim(); ++j) {
    const double mu = sigma_eig.eigenvalues(j);
    const Vector v = sigma_eig.eigenvectors.col(j);
    const double weight = (v.adjoint() * rho.mat() * v).value().real();
    if (mu <= kProbFloor) {
      if (weight > kWeightFloor) return DivergenceValue::infinity();
      continue;
    }
    rho_log_sigma += weight * std::log(mu);
  }

  return DivergenceValue::finite(detail::clamp_divergence(
      (rho_log_rho - rho_log_sigma) / std::log(base), "quantum_relative_entropy"));
}

// Incompatibility from raw statistics:
// [D(P(X) || P(X | nonselective Y)) + D(P(Y) || P(Y | nonselective X))] / 2.
inline ContextReport tici_distributions(const ContextStatistics& stats, double base = 2.0,
                                        double epsilon = kCompatibilityEps) {
  const DivergenceValue forward = kl_divergence(stats.x_before, stats.x_after_y, base);
  const DivergenceValue backward = kl_divergence(stats.y_before, stats.y_after_x, base);
  return detail::assemble_report(forward, backward, base, epsilon);
}

// Operator-level form for projective quantum contexts:
// [S(Phi_A(rho) || Phi_A(Phi_B(rho))) + S(Phi_B(rho) || Phi_B(Phi_A(rho)))] / 2.
// Both arguments of each relative entropy are diagonal in the same
// measurement basis, so this agrees with tici_distributions on the
// induced outcome statistics.
inline ContextReport tici_quantum(const DensityMatrix& rho, const ProjectiveMeasurement& a,
                                  const ProjectiveMeasurement& b, double base = 2.0,
                                  double epsilon = kCompatibilityEps) {
  if (rho.dim() != a.dim() || rho.dim() != b.dim()) {
    throw DimensionError("tici_quantum: context dimensions differ");
  }
  const DensityMatrix phi_a = nonselective_map(rho, a);
  const DensityMatrix phi_b = nonselective_map(rho, b);
  const DensityMatrix phi_a_after_b = nonselective_map(phi_b, a);
  const DensityMatrix phi_b_after_a = nonselective_map(phi_a, b);
  const DivergenceValue forward = quantum_relative_entropy(phi_a, phi_a_after_b, base);
  const DivergenceValue backward = quantum_relative_entropy(phi_b, phi_b_after_a, base);
  return detail::assemble_report(forward, backward, base, epsilon);
}

inline ContextReport tici_quantum(const Context& ctx, double base = 2.0,
                                  double epsilon = kCompatibilityEps) {
  return tici_quantum(ctx.preparation, ctx.meas_x, ctx.meas_y, base, epsilon);
}

struct CompatibilityResult {
  bool compatible = false;
  double residual_a = 0.0;  // || Phi_A(rho) - Phi_A(Phi_B(rho)) ||_2
  double residual_b = 0.0;  // || Phi_B(rho) - Phi_B(Phi_A(rho)) ||_2
};

// Operator-level compatibility criterion on Schatten-2 residuals.
inline CompatibilityResult compatibility_check(const DensityMatrix& rho,
                                               const ProjectiveMeasurement& a,
                                               const ProjectiveMeasurement& b,
                                               double epsilon = kCompatibilityEps) {
  if (rho.dim() != a.dim() || rho.dim() != b.dim()) {
    throw DimensionError("compatibility_check: context dimensions differ");
  }
  const DensityMatrix phi_a = nonselective_map(rho, a);
  const DensityMatrix phi_b = nonselective_map(rho, b);
  CompatibilityResult result;
  result.residual_a =
      schatten2_norm((phi_a.mat() - nonselective_map(phi_b, a).mat()).eval());
  result.residual_b =
      schatten2_norm((phi_b.mat() - nonselective_map(phi_a, b).mat()).eval());
  result.compatible = result.residual_a <= epsilon && result.residual_b <= epsilon;
  return result;
}

// Incompatibility of an eigenstate preparation |a_k> with measurements
// A and B: -(1/2) log_b sum_j Tr(A_k B_j)^2. Depends on the
// measurements alone.
inline double eigenstate_closed_form(std::size_t k, const ProjectiveMeasurement& a,
                                     const ProjectiveMeasurement& b, double base = 2.0) {
  detail::check_base(base, "eigenstate_closed_form");
  if (k >= a.outcomes()) {
    throw DomainError("eigenstate_closed_form: outcome index " + std::to_string(k) +
                      " out of range");
  }
  const RealMatrix t = transition_matrix(a, b);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    sum += t(static_cast<Eigen::Index>(k), j) * t(static_cast<Eigen::Index>(k), j);
  }
  return detail::clamp_divergence(-0.5 * std::log(sum) / std::log(base),
                                  "eigenstate_closed_form");
}

// Bloch direction of a two-outcome qubit measurement: the unit vector u
// with P_high - P_low = u . sigma.
inline BlochVector qubit_direction(const ProjectiveMeasurement& m) {
  if (m.dim() != 2 || m.outcomes() != 2) {
    throw DimensionError("qubit_direction: expected a two-outcome qubit measurement");
  }
  const Matrix diff = (m.projector(1) - m.projector(0)).eval();
  return {0.5 * (diff * pauli_x()).trace().real(), 0.5 * (diff * pauli_y()).trace().real(),
          0.5 * (diff * pauli_z()).trace().real()};
}

// The three ways a qubit context can be compatible.
enum class QubitCompatibilityCase {
  MaximallyMixed,        // r = 0
  CommutingObservables,  // a and b collinear, [A, B] = 0
  OrthogonalPreparation, // r perpendicular to span(a, b)
  Incompatible,
};

struct BlochClassification {
  QubitCompatibilityCase kind = QubitCompatibilityCase::Incompatible;
  bool compatible = false;
  double overlap_a = 0.0;  // r . (a - b(a.b)); the A-statistics residual is |overlap_a|/sqrt(2)
  double overlap_b = 0.0;  // r . (b - a(b.a))
  double mu = 0.0;         // || a - b(a.b) ||, equal to ||[A,B]||_2 / sqrt(8)
};

// Geometric compatibility conditions for a qubit context given the
// preparation's Bloch vector and the two measurement directions. The
// residual identity above makes the outcome agree with
// compatibility_check on the corresponding operators at the same
// epsilon.
inline BlochClassification qubit_bloch_conditions(const BlochVector& r, const BlochVector& a_hat,
                                                  const BlochVector& b_hat,
                                                  double epsilon = kCompatibilityEps) {
  if (std::abs(a_hat.norm() - 1.0) > 1e-9 || std::abs(b_hat.norm() - 1.0) > 1e-9) {
    throw ValidationError("qubit_bloch_conditions: measurement directions must be unit vectors");
  }
  const double ab = dot(a_hat, b_hat);
  const BlochVector u{a_hat.x - b_hat.x * ab, a_hat.y - b_hat.y * ab, a_hat.z - b_hat.z * ab};
  const BlochVector v{b_hat.x - a_hat.x * ab, b_hat.y - a_hat.y * ab, b_hat.z - a_hat.z * ab};

  BlochClassification out;
  out.overlap_a = dot(r, u);
  out.overlap_b = dot(r, v);
  out.mu = u.norm();
  const double bound = std::sqrt(2.0) * epsilon;
  out.compatible = std::abs(out.overlap_a) <= bound && std::abs(out.overlap_b) <= bound;
  if (!out.compatible) {
    out.kind = QubitCompatibilityCase::Incompatible;
  } else if (r.norm() <= 1e-9) {
    out.kind = QubitCompatibilityCase::MaximallyMixed;
  } else if (out.mu <= 1e-9) {
    out.kind = QubitCompatibilityCase::CommutingObservables;
  } else {
    out.kind = QubitCompatibilityCase::OrthogonalPreparation;
  }
  return out;
}

struct MaxSearchResult {
  double max_tici = 0.0;
  std::uint64_t best_index = 0;
  std::optional<Context> best;
};

// Randomized search for the largest incompatibility: Bloch-ball-uniform
// states (dimension 2; Gaussian-square states above) with Haar-random
// measurement bases. Each sample derives its own seed from the master
// seed, so results are independent of evaluation order; ties keep the
// lowest sample index.
inline MaxSearchResult random_context_max_search(std::size_t samples, std::uint64_t seed,
                                                 Eigen::Index dim = 2, double base = 2.0) {
  detail::check_base(base, "random_context_max_search");
  if (samples < 1) {
    throw DomainError("random_context_max_search: need at least one sample");
  }
  MaxSearchResult result;
  result.max_tici = -1.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, i));
    DensityMatrix rho = random_density(dim, rng);
    ProjectiveMeasurement a = projective_from_basis(random_unitary(dim, rng));
    ProjectiveMeasurement b = projective_from_basis(random_unitary(dim, rng));
    const ContextReport report = tici_quantum(rho, a, b, base);
    if (report.tici.infinite) {
      throw InvariantError("random_context_max_search: infinite divergence for a projective "
                           "context at sample " + std::to_string(i));
    }
    if (report.tici.value > result.max_tici) {
      result.max_tici = report.tici.value;
      result.best_index = i;
      result.best.emplace(std::move(rho), std::move(a), std::move(b));
    }
  }
  // Rank-1 projective qudit contexts cannot exceed (1/2) log_b d.
  const double cap = 0.5 * std::log(static_cast<double>(dim)) / std::log(base);
  if (result.max_tici > cap + 1e-9) {
    throw InvariantError("random_context_max_search: maximum " +
                         std::to_string(result.max_tici) + " exceeds the (1/2) log d bound");
  }
  return result;
}

}  // namespace tici
