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

// Measurement objects (projective and Kraus) and the nonselective
// measurement channels they induce: rho -> sum_k K_k rho K_k^dag.
// Outcome labels carry the observable's eigenvalues, in ascending
// order, so that distributions stay comparable across measurement
// orderings.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tici/errors.hpp"
#include "tici/linalg.hpp"
#include "tici/states.hpp"

namespace tici {

inline constexpr double kMeasurementTol = 1e-9;

// Observables whose eigenvalue gaps fall below this are treated as
// degenerate and rejected; silent block-projection would mask errors in
// the nondegenerate contexts this library targets.
inline constexpr double kDegeneracyGap = 1e-8;

// Complete family of rank-1 orthogonal projectors with strictly
// ascending real outcome labels.
class ProjectiveMeasurement {
 public:
  ProjectiveMeasurement(std::vector<Matrix> projectors, std::vector<double> labels)
      : projectors_(std::move(projectors)), labels_(std::move(labels)) {
    validate();
  }

  Eigen::Index dim() const { return projectors_.front().rows(); }
  std::size_t outcomes() const { return projectors_.size(); }
  const Matrix& projector(std::size_t k) const { return projectors_.at(k); }
  double label(std::size_t k) const { return labels_.at(k); }
  const std::vector<double>& labels() const { return labels_; }

 private:
  void validate() const {
    if (projectors_.empty() || projectors_.size() != labels_.size()) {
      throw ValidationError("ProjectiveMeasurement: need one label per projector");
    }
    const Eigen::Index d = projectors_.front().rows();
    if (static_cast<Eigen::Index>(projectors_.size()) != d) {
      throw ValidationError("ProjectiveMeasurement: rank-1 completeness needs dim outcomes");
    }
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < projectors_.size(); ++k) {
      const Matrix& p = projectors_[k];
      detail::require_square(p, "ProjectiveMeasurement");
      if (p.rows() != d) {
        throw DimensionError("ProjectiveMeasurement: mixed projector dimensions");
      }
      if (!is_hermitian(p, kMeasurementTol) || !approx_equal((p * p).eval(), p, kMeasurementTol)) {
        throw ValidationError("ProjectiveMeasurement: element " + std::to_string(k) +
                              " is not an orthogonal projector");
      }
      if (std::abs(p.trace() - Complex(1.0, 0.0)) > kMeasurementTol) {
        throw ValidationError("ProjectiveMeasurement: element " + std::to_string(k) +
                              " is not rank-1");
      }
      for (std::size_t l = 0; l < k; ++l) {
        if ((p * projectors_[l]).cwiseAbs().maxCoeff() > kMeasurementTol) {
          throw ValidationError("ProjectiveMeasurement: projectors " + std::to_string(l) +
                                " and " + std::to_string(k) + " overlap");
        }
      }
      if (k > 0 && !(labels_[k] > labels_[k - 1])) {
        throw ValidationError("ProjectiveMeasurement: labels must be strictly ascending");
      }
      sum += p;
    }
    if (!approx_equal(sum, Matrix::Identity(d, d), kMeasurementTol)) {
      throw ValidationError("ProjectiveMeasurement: projectors do not resolve the identity");
    }
  }

  std::vector<Matrix> projectors_;
  std::vector<double> labels_;
};

// General Kraus family with sum_k K_k^dag K_k = 1.
class KrausSet {
 public:
  explicit KrausSet(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) { validate(); }

  Eigen::Index dim() const { return kraus_.front().rows(); }
  std::size_t size() const { return kraus_.size(); }
  const Matrix& op(std::size_t k) const { return kraus_.at(k); }

 private:
  void validate() const {
    if (kraus_.empty()) {
      throw ValidationError("KrausSet: empty operator list");
    }
    const Eigen::Index d = kraus_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& k : kraus_) {
      detail::require_square(k, "KrausSet");
      if (k.rows() != d) {
        throw DimensionError("KrausSet: mixed operator dimensions");
      }
      sum += k.adjoint() * k;
    }
    if (!approx_equal(sum, Matrix::Identity(d, d), kMeasurementTol)) {
      throw ValidationError("KrausSet: operators do not satisfy the completeness relation");
    }
  }

  std::vector<Matrix> kraus_;
};

// Probability vector over labeled outcomes. Entries within 1e-12 of the
// boundary are clamped onto [0, 1]; the total must be 1 within 1e-9.
class OutcomeDistribution {
 public:
  OutcomeDistribution(std::vector<double> probs, std::vector<double> labels)
      : probs_(std::move(probs)), labels_(std::move(labels)) {
    if (probs_.empty() || probs_.size() != labels_.size()) {
      throw ValidationError("OutcomeDistribution: need one label per probability");
    }
    double total = 0.0;
    for (double& p : probs_) {
      if (p < -1e-12 || p > 1.0 + 1e-12) {
        throw ValidationError("OutcomeDistribution: probability " + std::to_string(p) +
                              " outside [0, 1]");
      }
      p = std::min(std::max(p, 0.0), 1.0);
      total += p;
    }
    if (std::abs(total - 1.0) > kMeasurementTol) {
      throw ValidationError("OutcomeDistribution: total probability " + std::to_string(total));
    }
  }

  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<double>& labels() const { return labels_; }

 private:
  std::vector<double> probs_;
  std::vector<double> labels_;
};

// Spectral decomposition of a nondegenerate Hermitian observable.
// Labels are the eigenvalues, ascending.
inline ProjectiveMeasurement projective_from_observable(const Matrix& obs) {
  const HermitianEig eig = hermitian_eig(obs);
  const Eigen::Index d = obs.rows();
  for (Eigen::Index k = 1; k < d; ++k) {
    const double gap = eig.eigenvalues(k) - eig.eigenvalues(k - 1);
    if (gap <= kDegeneracyGap) {
      throw ValidationError("projective_from_observable: eigenvalue gap " + std::to_string(gap) +
                            " is degenerate");
    }
  }
  std::vector<Matrix> projectors;
  std::vector<double> labels;
  projectors.reserve(static_cast<std::size_t>(d));
  labels.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    projectors.push_back(projector(Vector(eig.eigenvectors.col(k))));
    labels.push_back(eig.eigenvalues(k));
  }
  return ProjectiveMeasurement(std::move(projectors), std::move(labels));
}

// Measurement of an orthonormal basis given as unitary columns; labels
// are the column indices unless supplied.
inline ProjectiveMeasurement projective_from_basis(const Matrix& unitary) {
  detail::require_square(unitary, "projective_from_basis");
  std::vector<Matrix> projectors;
  std::vector<double> labels;
  for (Eigen::Index k = 0; k < unitary.cols(); ++k) {
    projectors.push_back(projector(Vector(unitary.col(k))));
    labels.push_back(static_cast<double>(k));
  }
  return ProjectiveMeasurement(std::move(projectors), std::move(labels));
}

inline OutcomeDistribution outcome_distribution(const DensityMatrix& rho,
                                                const ProjectiveMeasurement& m) {
  if (rho.dim() != m.dim()) {
    throw DimensionError("outcome_distribution: state dim " + std::to_string(rho.dim()) +
                         " vs measurement dim " + std::to_string(m.dim()));
  }
  std::vector<double> probs(m.outcomes());
  for (std::size_t k = 0; k < m.outcomes(); ++k) {
    probs[k] = (m.projector(k) * rho.mat()).trace().real();
  }
  return OutcomeDistribution(std::move(probs), m.labels());
}

inline OutcomeDistribution outcome_distribution(const DensityMatrix& rho, const KrausSet& m) {
  if (rho.dim() != m.dim()) {
    throw DimensionError("outcome_distribution: state dim " + std::to_string(rho.dim()) +
                         " vs measurement dim " + std::to_string(m.dim()));
  }
  std::vector<double> probs(m.size());
  std::vector<double> labels(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    probs[k] = (m.op(k).adjoint() * m.op(k) * rho.mat()).trace().real();
    labels[k] = static_cast<double>(k);
  }
  return OutcomeDistribution(std::move(probs), std::move(labels));
}

// Nonselective measurement channel, sum_k K_k rho K_k^dag. For a
// projective measurement this equals sum_k Tr(P_k rho) P_k, diagonal in
// the measurement basis.
inline DensityMatrix nonselective_map(const DensityMatrix& rho, const ProjectiveMeasurement& m) {
  if (rho.dim() != m.dim()) {
    throw DimensionError("nonselective_map: state dim " + std::to_string(rho.dim()) +
                         " vs measurement dim " + std::to_string(m.dim()));
  }
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (std::size_t k = 0; k < m.outcomes(); ++k) {
    out += m.projector(k) * rho.mat() * m.projector(k);
  }
  return DensityMatrix(std::move(out));
}

inline DensityMatrix nonselective_map(const DensityMatrix& rho, const KrausSet& m) {
  if (rho.dim() != m.dim()) {
    throw DimensionError("nonselective_map: state dim " + std::to_string(rho.dim()) +
                         " vs measurement dim " + std::to_string(m.dim()));
  }
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (std::size_t k = 0; k < m.size(); ++k) {
    out += m.op(k) * rho.mat() * m.op(k).adjoint();
  }
  return DensityMatrix(std::move(out));
}

// Channel composition second(first(rho)).
template <typename FirstMeasurement, typename SecondMeasurement>
DensityMatrix sequential_nonselective(const DensityMatrix& rho, const FirstMeasurement& first,
                                      const SecondMeasurement& second) {
  return nonselective_map(nonselective_map(rho, first), second);
}

// Doubly stochastic matrix of overlaps t(i, j) = Tr(A_i B_j).
inline RealMatrix transition_matrix(const ProjectiveMeasurement& a,
                                    const ProjectiveMeasurement& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("transition_matrix: measurement dims differ");
  }
  const Eigen::Index d = a.dim();
  RealMatrix t(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      t(i, j) = (a.projector(static_cast<std::size_t>(i)) *
                 b.projector(static_cast<std::size_t>(j)))
                    .trace()
                    .real();
  return t;
}

// A preparation with two projective measurements over the same space;
// the object the incompatibility quantifier scores.
struct Context {
  Context(DensityMatrix preparation_in, ProjectiveMeasurement meas_x_in,
          ProjectiveMeasurement meas_y_in)
      : preparation(std::move(preparation_in)),
        meas_x(std::move(meas_x_in)),
        meas_y(std::move(meas_y_in)) {
    if (preparation.dim() != meas_x.dim() || preparation.dim() != meas_y.dim()) {
      throw DimensionError("Context: preparation and measurement dimensions differ");
    }
  }

  DensityMatrix preparation;
  ProjectiveMeasurement meas_x;
  ProjectiveMeasurement meas_y;
};

}  // namespace tici
