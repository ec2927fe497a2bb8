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

// Dense complex-matrix algebra sized for Hilbert dimensions 2 to 8:
// tensor products, partial traces, Hermitian eigendecompositions,
// Schatten 2-norms and commutators. All functions are pure; values can
// be shared freely across threads.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <complex>
#include <string>
#include <utility>

#include "tici/errors.hpp"

namespace tici {

using Complex = std::complex<double>;

// Row-major dense storage throughout; dimensions stay small enough that
// sparsity never pays off.
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealVector = Eigen::VectorXd;

// Dense algorithms are only appropriate up to this dimension.
inline constexpr Eigen::Index kDefaultDimCap = 64;

// Hermiticity tolerance on max |m - m^dag| entries.
inline constexpr double kHermitianTol = 1e-9;

namespace detail {

inline void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError(std::string(who) + ": matrix must be square and nonempty, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void require_same_dim(const Matrix& a, const Matrix& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(who) + ": dimension mismatch, " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

}  // namespace detail

inline const Matrix& identity2() {
  static const Matrix m = Matrix::Identity(2, 2);
  return m;
}

inline const Matrix& pauli_x() {
  static const Matrix m = [] {
    Matrix p(2, 2);
    p << 0, 1, 1, 0;
    return p;
  }();
  return m;
}

inline const Matrix& pauli_y() {
  static const Matrix m = [] {
    Matrix p(2, 2);
    p << 0, Complex(0, -1), Complex(0, 1), 0;
    return p;
  }();
  return m;
}

inline const Matrix& pauli_z() {
  static const Matrix m = [] {
    Matrix p(2, 2);
    p << 1, 0, 0, -1;
    return p;
  }();
  return m;
}

inline Vector basis_ket(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) {
    throw DimensionError("basis_ket: index " + std::to_string(k) + " outside dimension " +
                         std::to_string(dim));
  }
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return v;
}

inline Matrix projector(const Vector& v) { return v * v.adjoint(); }

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }

inline bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_hermitian(const Matrix& m, double tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Tensor product. The (i1*db+i2, j1*db+j2) entry is a(i1,j1)*b(i2,j2).
inline Matrix kron(const Matrix& a, const Matrix& b, Eigen::Index dim_cap = kDefaultDimCap) {
  detail::require_square(a, "kron");
  detail::require_square(b, "kron");
  if (a.rows() * b.rows() > dim_cap) {
    throw DimensionError("kron: product dimension " + std::to_string(a.rows() * b.rows()) +
                         " exceeds cap " + std::to_string(dim_cap));
  }
  return Eigen::kroneckerProduct(a, b).eval();
}

inline Matrix kron(const Matrix& a, const Matrix& b, const Matrix& c,
                   Eigen::Index dim_cap = kDefaultDimCap) {
  return kron(a, kron(b, c, dim_cap), dim_cap);
}

enum class Subsystem { First, Second };

// Reduced matrix of the kept subsystem of a bipartite operator.
// Trace-preserving by construction.
inline Matrix partial_trace(const Matrix& m, std::pair<Eigen::Index, Eigen::Index> dims,
                            Subsystem keep) {
  detail::require_square(m, "partial_trace");
  const Eigen::Index d1 = dims.first;
  const Eigen::Index d2 = dims.second;
  if (d1 < 1 || d2 < 1 || d1 * d2 != m.rows()) {
    throw DimensionError("partial_trace: subsystem dims " + std::to_string(d1) + "x" +
                         std::to_string(d2) + " do not factor dimension " +
                         std::to_string(m.rows()));
  }
  if (keep == Subsystem::First) {
    Matrix out = Matrix::Zero(d1, d1);
    for (Eigen::Index i = 0; i < d1; ++i)
      for (Eigen::Index j = 0; j < d1; ++j)
        for (Eigen::Index k = 0; k < d2; ++k) out(i, j) += m(i * d2 + k, j * d2 + k);
    return out;
  }
  Matrix out = Matrix::Zero(d2, d2);
  for (Eigen::Index i = 0; i < d2; ++i)
    for (Eigen::Index j = 0; j < d2; ++j)
      for (Eigen::Index k = 0; k < d1; ++k) out(i, j) += m(k * d2 + i, k * d2 + j);
  return out;
}

struct HermitianEig {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, column k pairs with eigenvalues(k)
};

// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
// (m + m^dag)/2 before solving; inputs outside kHermitianTol are rejected
// rather than silently symmetrized.
inline HermitianEig hermitian_eig(const Matrix& m) {
  detail::require_square(m, "hermitian_eig");
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kHermitianTol) {
    throw ValidationError("hermitian_eig: input deviates from Hermitian by " +
                          std::to_string(dev));
  }
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("hermitian_eig: eigensolver failed to converge");
  }
  return HermitianEig{solver.eigenvalues(), solver.eigenvectors()};
}

// sqrt(Tr(m^dag m)), the Frobenius norm.
inline double schatten2_norm(const Matrix& m) { return m.norm(); }

inline Matrix commutator(const Matrix& a, const Matrix& b) {
  detail::require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

}  // namespace tici
