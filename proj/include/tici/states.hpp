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

// Construction and validation of quantum states: density matrices, the
// Bloch parametrization rho = (1 + r.sigma)/2 for qubits, the
// pure/mixed interpolation family, and seeded random sampling of
// states and unitaries.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "tici/errors.hpp"
#include "tici/linalg.hpp"
#include "tici/rng.hpp"

namespace tici {

// Validation tolerance for state invariants (Hermiticity, trace,
// positivity).
inline constexpr double kStateTol = 1e-9;

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double dot(const BlochVector& a, const BlochVector& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline BlochVector cross(const BlochVector& a, const BlochVector& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// v . sigma for a real 3-vector.
inline Matrix pauli_dot(const BlochVector& v) {
  return (v.x * pauli_x() + v.y * pauli_y() + v.z * pauli_z()).eval();
}

// Hermitian within kStateTol, unit trace, eigenvalues >= -kStateTol.
// Invariants are checked on construction; instances are immutable.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m) : mat_(std::move(m)) { validate(); }

  const Matrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  void validate() const {
    detail::require_square(mat_, "DensityMatrix");
    const double herm_dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > kStateTol) {
      throw ValidationError("DensityMatrix: Hermiticity deviation " + std::to_string(herm_dev));
    }
    const double trace_dev = std::abs(mat_.trace() - Complex(1.0, 0.0));
    if (trace_dev > kStateTol) {
      throw ValidationError("DensityMatrix: trace deviates from 1 by " +
                            std::to_string(trace_dev));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (mat_ + mat_.adjoint()),
                                                 Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kStateTol) {
      throw ValidationError("DensityMatrix: negative eigenvalue " +
                            std::to_string(solver.eigenvalues().minCoeff()));
    }
  }

  Matrix mat_;
};

inline DensityMatrix density_from_bloch(const BlochVector& r) {
  if (r.norm() > 1.0 + kStateTol) {
    throw ValidationError("density_from_bloch: Bloch norm " + std::to_string(r.norm()) +
                          " exceeds 1");
  }
  return DensityMatrix(0.5 * (Matrix::Identity(2, 2) + pauli_dot(r)));
}

inline BlochVector bloch_from_density(const DensityMatrix& rho) {
  if (rho.dim() != 2) {
    throw DimensionError("bloch_from_density: expected dimension 2, got " +
                         std::to_string(rho.dim()));
  }
  return {(rho.mat() * pauli_x()).trace().real(), (rho.mat() * pauli_y()).trace().real(),
          (rho.mat() * pauli_z()).trace().real()};
}

// rho = (p/2) 1 + (1 - p) |psi><psi| with
// |psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
// p runs over [0, 2]; p = 2 realizes the pure state antipodal to psi,
// and the eigenvalues are {p/2, 1 - p/2} for every p in the range.
// Angles are accepted as given (they enter only through sin/cos).
inline DensityMatrix interpolated_state(double p, double theta, double phi) {
  if (!(p >= 0.0 && p <= 2.0)) {
    throw DomainError("interpolated_state: p = " + std::to_string(p) +
                      " outside the legal range [0, 2]");
  }
  Vector psi(2);
  psi << Complex(std::cos(theta / 2.0), 0.0),
      std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0);
  return DensityMatrix(0.5 * p * Matrix::Identity(2, 2) + (1.0 - p) * projector(psi));
}

// Haar-distributed unitary: QR of a complex Gaussian matrix with the R
// diagonal phases folded back in.
inline Matrix random_unitary(Eigen::Index dim, Rng& rng) {
  if (dim < 2) {
    throw DomainError("random_unitary: dimension must be at least 2");
  }
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Vector diag = qr.matrixQR().diagonal();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double mag = std::abs(diag(k));
    q.col(k) *= (mag > 0.0) ? diag(k) / mag : Complex(1.0, 0.0);
  }
  return q;
}

inline Matrix random_unitary(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(dim, rng);
}

inline DensityMatrix random_pure(Eigen::Index dim, Rng& rng) {
  if (dim < 2) {
    throw DomainError("random_pure: dimension must be at least 2");
  }
  Vector psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) psi(i) = Complex(rng.gaussian(), rng.gaussian());
  psi /= psi.norm();
  return DensityMatrix(projector(psi));
}

inline DensityMatrix random_pure(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_pure(dim, rng);
}

// Uniform over the Bloch ball for qubits; for larger dimensions a
// normalized Gaussian square (full-rank almost surely).
inline DensityMatrix random_density(Eigen::Index dim, Rng& rng) {
  if (dim < 2) {
    throw DomainError("random_density: dimension must be at least 2");
  }
  if (dim == 2) {
    double x = rng.gaussian();
    double y = rng.gaussian();
    double z = rng.gaussian();
    const double n = std::sqrt(x * x + y * y + z * z);
    const double radius = std::cbrt(rng.uniform());
    return density_from_bloch({radius * x / n, radius * y / n, radius * z / n});
  }
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityMatrix(std::move(rho));
}

inline DensityMatrix random_density(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(dim, rng);
}

}  // namespace tici
