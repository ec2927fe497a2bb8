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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "test_helpers.hpp"
#include "tici/measurements.hpp"

using namespace tici;
using tici::testing::random_hermitian;

namespace {

constexpr double kPi = std::numbers::pi;

ProjectiveMeasurement sigma_z_measurement() { return projective_from_observable(pauli_z()); }
ProjectiveMeasurement sigma_x_measurement() { return projective_from_observable(pauli_x()); }

Vector plus_ket() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("projective_from_observable orders labels ascending", "[measurements]") {
  const ProjectiveMeasurement mz = sigma_z_measurement();
  REQUIRE(mz.outcomes() == 2);
  REQUIRE(mz.label(0) == Catch::Approx(-1.0).margin(1e-12));
  REQUIRE(mz.label(1) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(approx_equal(mz.projector(0), projector(basis_ket(2, 1)), 1e-12));
  REQUIRE(approx_equal(mz.projector(1), projector(basis_ket(2, 0)), 1e-12));

  const ProjectiveMeasurement mx = sigma_x_measurement();
  REQUIRE(approx_equal(mx.projector(1), projector(plus_ket()), 1e-12));

  // A Bloch direction (sin(pi/2), 0, cos(pi/2)) is the x-axis, so the
  // projectors coincide with the pauli_x ones.
  const Matrix rotated = (std::sin(kPi / 2.0) * pauli_x() + std::cos(kPi / 2.0) * pauli_z()).eval();
  const ProjectiveMeasurement mr = projective_from_observable(rotated);
  REQUIRE(approx_equal(mr.projector(0), mx.projector(0), 1e-12));
  REQUIRE(approx_equal(mr.projector(1), mx.projector(1), 1e-12));
}

TEST_CASE("projective_from_observable rejects degenerate spectra", "[measurements]") {
  REQUIRE_THROWS_AS(projective_from_observable(Matrix::Identity(2, 2)), ValidationError);

  Matrix nearly(2, 2);
  nearly << 1.0, 0.0, 0.0, 1.0 + 5e-9;
  REQUIRE_THROWS_AS(projective_from_observable(nearly), ValidationError);

  Matrix fine(2, 2);
  fine << 0.0, 0.0, 0.0, 1.0;
  REQUIRE_NOTHROW(projective_from_observable(fine));
}

TEST_CASE("ProjectiveMeasurement validates its family", "[measurements]") {
  const Matrix p0 = projector(basis_ket(2, 0));
  const Matrix p1 = projector(basis_ket(2, 1));
  const Matrix pplus = projector(plus_ket());

  REQUIRE_THROWS_AS(ProjectiveMeasurement({p0, pplus}, {0.0, 1.0}), ValidationError);
  REQUIRE_THROWS_AS(ProjectiveMeasurement({p0}, {0.0}), ValidationError);
  REQUIRE_THROWS_AS(ProjectiveMeasurement({p0, p1}, {1.0, 0.0}), ValidationError);
  REQUIRE_NOTHROW(ProjectiveMeasurement({p1, p0}, {-1.0, 1.0}));
}

TEST_CASE("outcome_distribution on projective measurements", "[measurements]") {
  const ProjectiveMeasurement mz = sigma_z_measurement();

  const OutcomeDistribution d0 = outcome_distribution(density_from_bloch({0, 0, 1}), mz);
  REQUIRE(d0.probs()[0] == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(d0.probs()[1] == Catch::Approx(1.0).margin(1e-14));
  REQUIRE(d0.labels()[0] == -1.0);
  REQUIRE(d0.labels()[1] == 1.0);

  const OutcomeDistribution dm = outcome_distribution(density_from_bloch({0, 0, 0}), mz);
  REQUIRE(dm.probs()[0] == Catch::Approx(0.5).margin(1e-14));
  REQUIRE(dm.probs()[1] == Catch::Approx(0.5).margin(1e-14));

  // x-axis family member at p = 0.5 has Bloch x-component 0.5, so the
  // pauli_x outcomes carry (1 -+ 0.5)/2.
  const OutcomeDistribution dx =
      outcome_distribution(interpolated_state(0.5, kPi / 2.0, 0.0), sigma_x_measurement());
  REQUIRE(dx.probs()[0] == Catch::Approx(0.25).margin(1e-12));
  REQUIRE(dx.probs()[1] == Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("outcome_distribution on Kraus sets matches the projective route", "[measurements]") {
  const ProjectiveMeasurement mx = sigma_x_measurement();
  const KrausSet kraus({mx.projector(0), mx.projector(1)});
  Rng rng(71);
  for (int trial = 0; trial < 25; ++trial) {
    const DensityMatrix rho = random_density(2, rng);
    const OutcomeDistribution via_proj = outcome_distribution(rho, mx);
    const OutcomeDistribution via_kraus = outcome_distribution(rho, kraus);
    REQUIRE(via_kraus.probs()[0] == Catch::Approx(via_proj.probs()[0]).margin(1e-12));
    REQUIRE(via_kraus.probs()[1] == Catch::Approx(via_proj.probs()[1]).margin(1e-12));
  }
}

TEST_CASE("nonselective_map dephases in the measured basis", "[measurements]") {
  const DensityMatrix plus(projector(plus_ket()));
  const DensityMatrix dephased = nonselective_map(plus, sigma_z_measurement());
  REQUIRE(approx_equal(dephased.mat(), 0.5 * Matrix::Identity(2, 2), 1e-12));

  // Eigenprojectors are fixed points.
  const ProjectiveMeasurement mx = sigma_x_measurement();
  const DensityMatrix pure_plus(mx.projector(1));
  REQUIRE(approx_equal(nonselective_map(pure_plus, mx).mat(), mx.projector(1), 1e-12));

  // A state already diagonal in the measured basis is unchanged.
  const DensityMatrix rho_x = interpolated_state(0.5, kPi / 2.0, 0.0);
  const DensityMatrix mapped = nonselective_map(rho_x, mx);
  REQUIRE(approx_equal(mapped.mat(), rho_x.mat(), 1e-12));
  const BlochVector r = bloch_from_density(mapped);
  REQUIRE(r.x == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(std::abs(r.y) < 1e-12);
  REQUIRE(std::abs(r.z) < 1e-12);
}

TEST_CASE("nonselective_map is a trace-preserving positive channel", "[measurements]") {
  Rng rng(83);
  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix rho = random_density(3, rng);
    const ProjectiveMeasurement m = projective_from_basis(random_unitary(3, rng));
    const DensityMatrix out = nonselective_map(rho, m);
    REQUIRE(std::abs(out.mat().trace() - Complex(1.0, 0.0)) < 1e-12);
    REQUIRE(is_hermitian(out.mat(), 1e-12));
    REQUIRE(hermitian_eig(out.mat()).eigenvalues.minCoeff() >= -1e-12);
  }
}

TEST_CASE("projective channel equals its diagonal form", "[measurements]") {
  Rng rng(89);
  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix rho = random_density(2, rng);
    const ProjectiveMeasurement m = projective_from_basis(random_unitary(2, rng));
    const DensityMatrix via_kraus = nonselective_map(rho, m);
    Matrix diagonal_form = Matrix::Zero(2, 2);
    for (std::size_t k = 0; k < m.outcomes(); ++k) {
      diagonal_form += (m.projector(k) * rho.mat()).trace().real() * m.projector(k);
    }
    REQUIRE(approx_equal(via_kraus.mat(), diagonal_form, 1e-12));
  }
}

TEST_CASE("projective channels are idempotent", "[measurements]") {
  Rng rng(97);
  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix rho = random_density(2, rng);
    const ProjectiveMeasurement m = projective_from_basis(random_unitary(2, rng));
    const DensityMatrix once = nonselective_map(rho, m);
    const DensityMatrix twice = nonselective_map(once, m);
    REQUIRE(approx_equal(twice.mat(), once.mat(), 1e-12));
  }
}

TEST_CASE("a nonselective measurement keeps its own statistics", "[measurements]") {
  Rng rng(103);
  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix rho = random_density(2, rng);
    const ProjectiveMeasurement m = projective_from_basis(random_unitary(2, rng));
    const OutcomeDistribution before = outcome_distribution(rho, m);
    const OutcomeDistribution after = outcome_distribution(nonselective_map(rho, m), m);
    for (std::size_t k = 0; k < before.size(); ++k) {
      REQUIRE(after.probs()[k] == Catch::Approx(before.probs()[k]).margin(1e-12));
    }
  }
}

TEST_CASE("sequential_nonselective composes channels", "[measurements]") {
  const ProjectiveMeasurement mz = sigma_z_measurement();
  const ProjectiveMeasurement mx = sigma_x_measurement();

  SECTION("repeating a measurement adds nothing") {
    Rng rng(109);
    const DensityMatrix rho = random_density(2, rng);
    REQUIRE(approx_equal(sequential_nonselective(rho, mz, mz).mat(),
                         nonselective_map(rho, mz).mat(), 1e-12));
  }
  SECTION("unbiased-basis chain fully mixes") {
    const DensityMatrix rho = density_from_bloch({0, 0, 1});
    REQUIRE(approx_equal(sequential_nonselective(rho, mx, mz).mat(),
                         0.5 * Matrix::Identity(2, 2), 1e-12));
  }
  SECTION("commuting measurements give order-independent results") {
    // Two observables sharing the pauli_z eigenbasis but with different
    // spectra commute.
    const ProjectiveMeasurement m2z = projective_from_observable((2.0 * pauli_z()).eval());
    Rng rng(113);
    for (int trial = 0; trial < 10; ++trial) {
      const DensityMatrix rho = random_density(2, rng);
      REQUIRE(approx_equal(sequential_nonselective(rho, mz, m2z).mat(),
                           sequential_nonselective(rho, m2z, mz).mat(), 1e-12));
    }
  }
  SECTION("matches the overlap-weighted closed form") {
    // second(first(rho)) = sum_ij p(a_i) Tr(A_i B_j) B_j for projective
    // measurements.
    Rng rng(127);
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrix rho = random_density(2, rng);
      const ProjectiveMeasurement a = projective_from_basis(random_unitary(2, rng));
      const ProjectiveMeasurement b = projective_from_basis(random_unitary(2, rng));
      Matrix closed = Matrix::Zero(2, 2);
      const OutcomeDistribution pa = outcome_distribution(rho, a);
      for (std::size_t i = 0; i < a.outcomes(); ++i)
        for (std::size_t j = 0; j < b.outcomes(); ++j) {
          const double overlap = (a.projector(i) * b.projector(j)).trace().real();
          closed += pa.probs()[i] * overlap * b.projector(j);
        }
      REQUIRE(approx_equal(sequential_nonselective(rho, a, b).mat(), closed, 1e-12));
    }
  }
}

TEST_CASE("transition_matrix overlaps", "[measurements]") {
  const ProjectiveMeasurement mz = sigma_z_measurement();
  const ProjectiveMeasurement mx = sigma_x_measurement();

  const RealMatrix self = transition_matrix(mz, mz);
  REQUIRE(std::abs(self(0, 0) - 1.0) < 1e-12);
  REQUIRE(std::abs(self(1, 1) - 1.0) < 1e-12);
  REQUIRE(std::abs(self(0, 1)) < 1e-12);

  const RealMatrix mub = transition_matrix(mx, mz);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) REQUIRE(std::abs(mub(i, j) - 0.5) < 1e-12);

  // Bloch direction at polar angle pi/4 from the z-axis: overlaps are
  // cos^2(pi/8) and sin^2(pi/8).
  const Matrix tilted = ((pauli_x() + pauli_z()) / std::sqrt(2.0)).eval();
  const RealMatrix t = transition_matrix(projective_from_observable(tilted), mz);
  const double c2 = std::cos(kPi / 8.0) * std::cos(kPi / 8.0);
  REQUIRE(t(1, 1) == Catch::Approx(c2).margin(1e-12));
  REQUIRE(t(1, 0) == Catch::Approx(1.0 - c2).margin(1e-12));
  REQUIRE(t(0, 0) == Catch::Approx(c2).margin(1e-12));
}

TEST_CASE("transition_matrix is doubly stochastic", "[measurements]") {
  Rng rng(131);
  for (int trial = 0; trial < 20; ++trial) {
    const ProjectiveMeasurement a = projective_from_basis(random_unitary(3, rng));
    const ProjectiveMeasurement b = projective_from_basis(random_unitary(3, rng));
    const RealMatrix t = transition_matrix(a, b);
    for (Eigen::Index i = 0; i < 3; ++i) {
      REQUIRE(std::abs(t.row(i).sum() - 1.0) < 1e-10);
      REQUIRE(std::abs(t.col(i).sum() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("KrausSet validates completeness", "[measurements]") {
  REQUIRE_THROWS_AS(KrausSet({(0.5 * pauli_x()).eval()}), ValidationError);
  const Matrix half = (Matrix::Identity(2, 2) / std::sqrt(2.0)).eval();
  REQUIRE_NOTHROW(KrausSet({half, half}));
}

TEST_CASE("OutcomeDistribution clamps and validates", "[measurements]") {
  const OutcomeDistribution clamped({-1e-13, 1.0}, {0.0, 1.0});
  REQUIRE(clamped.probs()[0] == 0.0);
  REQUIRE_THROWS_AS(OutcomeDistribution({0.2, 0.2}, {0.0, 1.0}), ValidationError);
  REQUIRE_THROWS_AS(OutcomeDistribution({-0.1, 1.1}, {0.0, 1.0}), ValidationError);
  REQUIRE_THROWS_AS(OutcomeDistribution({0.5, 0.5}, {0.0}), ValidationError);
}

TEST_CASE("Context requires matching dimensions", "[measurements]") {
  Rng rng(137);
  const DensityMatrix rho2 = random_density(2, rng);
  const ProjectiveMeasurement m2 = sigma_z_measurement();
  const ProjectiveMeasurement m3 = projective_from_basis(random_unitary(3, rng));
  REQUIRE_NOTHROW(Context(rho2, m2, m2));
  REQUIRE_THROWS_AS(Context(rho2, m2, m3), DimensionError);
}

TEST_CASE("dimension mismatches are rejected across operations", "[measurements]") {
  Rng rng(139);
  const DensityMatrix rho3 = random_density(3, rng);
  const ProjectiveMeasurement m2 = sigma_z_measurement();
  REQUIRE_THROWS_AS(outcome_distribution(rho3, m2), DimensionError);
  REQUIRE_THROWS_AS(nonselective_map(rho3, m2), DimensionError);
  REQUIRE_THROWS_AS(transition_matrix(m2, projective_from_basis(random_unitary(3, rng))),
                    DimensionError);
}
