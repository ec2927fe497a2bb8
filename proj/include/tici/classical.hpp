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

// Finite classical statistical theory. Whenever a joint probability
// table exists, nonselective measurement of either variable is the
// identity on the joint, so every classical context is compatible and
// the incompatibility quantifier vanishes. A discretized phase-space
// density shows the same thing for position/momentum delta
// measurements.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tici/errors.hpp"
#include "tici/incompat.hpp"
#include "tici/linalg.hpp"
#include "tici/measurements.hpp"
#include "tici/rng.hpp"

namespace tici {

enum class Axis { X, Y };

// Joint probability table over two finite variables. Rows are X
// outcomes, columns are Y outcomes.
class JointDistribution {
 public:
  JointDistribution(RealMatrix table, std::vector<double> x_labels, std::vector<double> y_labels)
      : table_(std::move(table)), x_labels_(std::move(x_labels)), y_labels_(std::move(y_labels)) {
    if (table_.rows() < 1 || table_.cols() < 1) {
      throw ValidationError("JointDistribution: table must be nonempty");
    }
    if (static_cast<std::size_t>(table_.rows()) != x_labels_.size() ||
        static_cast<std::size_t>(table_.cols()) != y_labels_.size()) {
      throw ValidationError("JointDistribution: label counts do not match the table shape");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < table_.rows(); ++i) {
      for (Eigen::Index j = 0; j < table_.cols(); ++j) {
        if (table_(i, j) < 0.0) {
          throw ValidationError("JointDistribution: negative entry at (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
        }
        sum += table_(i, j);
      }
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ValidationError("JointDistribution: entries sum to " + std::to_string(sum) +
                            ", expected 1");
    }
  }

  const RealMatrix& table() const { return table_; }
  const std::vector<double>& x_labels() const { return x_labels_; }
  const std::vector<double>& y_labels() const { return y_labels_; }
  Eigen::Index rows() const { return table_.rows(); }
  Eigen::Index cols() const { return table_.cols(); }

 private:
  RealMatrix table_;
  std::vector<double> x_labels_;
  std::vector<double> y_labels_;
};

inline OutcomeDistribution marginal(const JointDistribution& j, Axis axis) {
  if (axis == Axis::X) {
    std::vector<double> probs(static_cast<std::size_t>(j.rows()));
    for (Eigen::Index i = 0; i < j.rows(); ++i) {
      probs[static_cast<std::size_t>(i)] = j.table().row(i).sum();
    }
    return OutcomeDistribution(std::move(probs), j.x_labels());
  }
  std::vector<double> probs(static_cast<std::size_t>(j.cols()));
  for (Eigen::Index k = 0; k < j.cols(); ++k) {
    probs[static_cast<std::size_t>(k)] = j.table().col(k).sum();
  }
  return OutcomeDistribution(std::move(probs), j.y_labels());
}

// Nonselective measurement of one variable: condition on each outcome,
// then reassemble the joint weighted by the outcome probabilities.
// Outcomes of zero probability contribute zero (0/0 := 0). The result
// always equals the input; the computation follows the definition
// rather than shortcutting to the identity.
inline JointDistribution nonselective_classical(const JointDistribution& j, Axis measured) {
  RealMatrix out = RealMatrix::Zero(j.rows(), j.cols());
  if (measured == Axis::X) {
    for (Eigen::Index i = 0; i < j.rows(); ++i) {
      const double px = j.table().row(i).sum();
      if (px <= 0.0) continue;
      for (Eigen::Index k = 0; k < j.cols(); ++k) {
        out(i, k) = px * (j.table()(i, k) / px);
      }
    }
  } else {
    for (Eigen::Index k = 0; k < j.cols(); ++k) {
      const double py = j.table().col(k).sum();
      if (py <= 0.0) continue;
      for (Eigen::Index i = 0; i < j.rows(); ++i) {
        out(i, k) = py * (j.table()(i, k) / py);
      }
    }
  }
  return JointDistribution(std::move(out), j.x_labels(), j.y_labels());
}

// Compatibility report for the classical context a joint table
// defines. Always zero up to float summation noise.
inline ContextReport classical_compat_check(const JointDistribution& j, double base = 2.0,
                                            double epsilon = kCompatibilityEps) {
  const JointDistribution after_x = nonselective_classical(j, Axis::X);
  const JointDistribution after_y = nonselective_classical(j, Axis::Y);
  const ContextStatistics stats{
      marginal(j, Axis::X),
      marginal(after_y, Axis::X),
      marginal(j, Axis::Y),
      marginal(after_x, Axis::Y),
  };
  return tici_distributions(stats, base, epsilon);
}

// Uniform-random joint table, for property sweeps and the CLI's
// classical-check mode.
inline JointDistribution random_joint(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw DomainError("random_joint: table must be nonempty");
  RealMatrix table(rows, cols);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      table(i, k) = rng.uniform();
      sum += table(i, k);
    }
  }
  table /= sum;
  std::vector<double> x_labels(static_cast<std::size_t>(rows));
  std::vector<double> y_labels(static_cast<std::size_t>(cols));
  for (std::size_t i = 0; i < x_labels.size(); ++i) x_labels[i] = static_cast<double>(i);
  for (std::size_t k = 0; k < y_labels.size(); ++k) y_labels[k] = static_cast<double>(k);
  return JointDistribution(std::move(table), std::move(x_labels), std::move(y_labels));
}

// Discretized phase-space density. Rows index position cells, columns
// index momentum cells; density * dq * dpi sums to 1.
class PhaseSpaceGrid {
 public:
  PhaseSpaceGrid(RealMatrix density, double dq, double dpi)
      : density_(std::move(density)), dq_(dq), dpi_(dpi) {
    if (!(dq_ > 0.0) || !(dpi_ > 0.0)) {
      throw DomainError("PhaseSpaceGrid: cell widths must be positive");
    }
    if (density_.rows() < 1 || density_.cols() < 1) {
      throw ValidationError("PhaseSpaceGrid: density must be nonempty");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < density_.rows(); ++i) {
      for (Eigen::Index k = 0; k < density_.cols(); ++k) {
        if (density_(i, k) < 0.0) {
          throw ValidationError("PhaseSpaceGrid: negative density at (" + std::to_string(i) +
                                ", " + std::to_string(k) + ")");
        }
        sum += density_(i, k);
      }
    }
    if (std::abs(sum * dq_ * dpi_ - 1.0) > 1e-9) {
      throw ValidationError("PhaseSpaceGrid: density integrates to " +
                            std::to_string(sum * dq_ * dpi_) + ", expected 1");
    }
  }

  const RealMatrix& density() const { return density_; }
  double dq() const { return dq_; }
  double dpi() const { return dpi_; }

 private:
  RealMatrix density_;
  double dq_;
  double dpi_;
};

enum class GridAxis { Position, Momentum };

// Nonselective delta measurement of one phase-space coordinate: each
// outcome cell keeps its conditional slice (the finite analog of a
// Dirac-delta collapse), and the slices are averaged back together
// with the outcome probabilities. Zero-mass slices are skipped.
inline PhaseSpaceGrid nonselective_phase_space(const PhaseSpaceGrid& g, GridAxis axis) {
  const RealMatrix& rho = g.density();
  RealMatrix out = RealMatrix::Zero(rho.rows(), rho.cols());
  if (axis == GridAxis::Position) {
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
      // Outcome probability of this position cell.
      const double weight = rho.row(i).sum() * g.dq() * g.dpi();
      if (weight <= 0.0) continue;
      // Collapsed density: the conditional slice concentrated on the
      // cell, with 1/dq playing the role of the delta's height.
      const double norm = rho.row(i).sum() * g.dpi();
      for (Eigen::Index k = 0; k < rho.cols(); ++k) {
        out(i, k) += weight * (rho(i, k) / norm) / g.dq();
      }
    }
  } else {
    for (Eigen::Index k = 0; k < rho.cols(); ++k) {
      const double weight = rho.col(k).sum() * g.dq() * g.dpi();
      if (weight <= 0.0) continue;
      const double norm = rho.col(k).sum() * g.dq();
      for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        out(i, k) += weight * (rho(i, k) / norm) / g.dpi();
      }
    }
  }
  return PhaseSpaceGrid(std::move(out), g.dq(), g.dpi());
}

struct LiouvilleReport {
  double l1_q = 0.0;           // recovery distance after a position measurement
  double l1_pi = 0.0;          // after a momentum measurement
  double l1_sequential = 0.0;  // after position then momentum
};

namespace detail {

inline double grid_l1_distance(const PhaseSpaceGrid& a, const PhaseSpaceGrid& b) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.density().rows(); ++i) {
    for (Eigen::Index k = 0; k < a.density().cols(); ++k) {
      sum += std::abs(a.density()(i, k) - b.density()(i, k));
    }
  }
  return sum * a.dq() * a.dpi();
}

}  // namespace detail

// Measuring either coordinate nonselectively, or both in sequence,
// must return the original density. Reports the three L1 recovery
// distances; all are below 1e-12 for any valid grid.
inline LiouvilleReport liouville_measurement_demo(const PhaseSpaceGrid& g) {
  const PhaseSpaceGrid after_q = nonselective_phase_space(g, GridAxis::Position);
  const PhaseSpaceGrid after_pi = nonselective_phase_space(g, GridAxis::Momentum);
  const PhaseSpaceGrid after_both = nonselective_phase_space(after_q, GridAxis::Momentum);
  LiouvilleReport report;
  report.l1_q = detail::grid_l1_distance(after_q, g);
  report.l1_pi = detail::grid_l1_distance(after_pi, g);
  report.l1_sequential = detail::grid_l1_distance(after_both, g);
  return report;
}

}  // namespace tici
