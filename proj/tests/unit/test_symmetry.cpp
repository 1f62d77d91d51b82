// Copyright 2026 The qrclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cmath>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "qrclab/symmetry.hpp"

using namespace qrc;
using qrc::test::random_density;

TEST_CASE("magnetization sectors are Hamming-weight classes") {
  const auto d = SectorDecomposition::magnetization(3);
  CHECK(d.sector_count() == 4);
  CHECK(d.dims() == std::vector<Index>{1, 3, 3, 1});
  for (Index i = 0; i < 8; ++i) CHECK(d.sector_of(i) == std::popcount(static_cast<unsigned>(i)));
  CHECK(d.sector(1) == std::vector<Index>{1, 2, 4});
  CHECK_THROWS(SectorDecomposition::magnetization(0));
  CHECK_THROWS(SectorDecomposition::magnetization(15));
}

TEST_CASE("sectors from the total-Z diagonal reproduce magnetization") {
  const int n = 4;
  const ComplexMatrix m = magnetization_operator(n);
  std::vector<RealVector> diags{m.diagonal().real()};
  const auto d = SectorDecomposition::from_diagonal_symmetries(n, diags);
  const auto ref = SectorDecomposition::magnetization(n);
  CHECK(d.sector_count() == ref.sector_count());
  for (Index i = 0; i < d.dim(); ++i)
    for (Index j = 0; j < d.dim(); ++j)
      CHECK((d.sector_of(i) == d.sector_of(j)) == (ref.sector_of(i) == ref.sector_of(j)));
}

TEST_CASE("joint sectors of magnetization and a single-qubit Z refine both") {
  const int n = 3;
  std::vector<RealVector> diags{magnetization_operator(n).diagonal().real(),
                                single_qubit_operator(n, 0, pauli::Z()).diagonal().real()};
  const auto d = SectorDecomposition::from_diagonal_symmetries(n, diags);
  // weights 0 and 3 stay whole; weights 1 and 2 split by qubit 0.
  CHECK(d.sector_count() == 6);
  CHECK(d.sector_of(0) == 0);
}

TEST_CASE("sector projectors resolve the identity") {
  const auto d = SectorDecomposition::magnetization(3);
  ComplexMatrix sum = ComplexMatrix::Zero(8, 8);
  for (int l = 0; l < d.sector_count(); ++l) {
    const ComplexMatrix p = sector_projector(d, l);
    CHECK(max_abs_diff(p * p, p) < 1e-15);
    CHECK(p.trace().real() == doctest::Approx(double(d.sector_dim(l))));
    for (int m = l + 1; m < d.sector_count(); ++m) CHECK(max_abs(p * sector_projector(d, m)) < 1e-15);
    sum += p;
  }
  CHECK(max_abs_diff(sum, ComplexMatrix::Identity(8, 8)) < 1e-15);
}

TEST_CASE("block-Haar unitaries commute with magnetization and parity") {
  RngStream rng(1);
  for (int n = 1; n <= 6; ++n) {
    const auto d = SectorDecomposition::magnetization(n);
    const auto u = block_haar_unitary(d, rng);
    CHECK(unitarity_error(u.matrix()) < 1e-12);
    CHECK(commutator_norm(u.matrix(), magnetization_operator(n)) < 1e-12);
    CHECK(commutator_norm(u.matrix(), parity_operator(n)) < 1e-12);
    for (int l = 0; l < d.sector_count(); ++l)
      CHECK(commutator_norm(u.matrix(), sector_projector(d, l)) < 1e-12);
  }
}

TEST_CASE("block-Haar unitaries mix inside a sector") {
  RngStream rng(2);
  const auto d = SectorDecomposition::magnetization(3);
  const auto u = block_haar_unitary(d, rng);
  CHECK(std::abs(u.matrix()(1, 2)) > 0.0);
  CHECK(std::abs(u.matrix()(1, 3)) == 0.0);
}

TEST_CASE("parity and magnetization operators") {
  const ComplexMatrix p = parity_operator(3);
  CHECK(max_abs_diff(p, kron(kron(pauli::Z(), pauli::Z()), pauli::Z())) == 0.0);
  CHECK(max_abs_diff(p * p, ComplexMatrix::Identity(8, 8)) == 0.0);
  ComplexMatrix sz = ComplexMatrix::Zero(8, 8);
  for (int q = 0; q < 3; ++q) sz += single_qubit_operator(3, q, pauli::Z());
  CHECK(max_abs_diff(magnetization_operator(3), sz) == 0.0);
  const auto d = SectorDecomposition::magnetization(3);
  CHECK(max_abs_diff(BlockObservable::magnetization(d).materialize(), sz) == 0.0);
  CHECK(max_abs_diff(BlockObservable::parity(d).materialize(), p) == 0.0);
}

TEST_CASE("alpha vectors") {
  const auto u = AlphaVector::uniform(3);
  CHECK(u[1] == doctest::Approx(1.0 / 3));
  const auto p = AlphaVector::point(4, 1);
  CHECK(p.reversed()[2] == 1.0);
  CHECK_THROWS(AlphaVector::checked(RealVector::Constant(2, 0.6)));
  CHECK_THROWS(AlphaVector::checked((RealVector(2) << 1.1, -0.1).finished()));
  CHECK_NOTHROW(AlphaVector::checked((RealVector(2) << 1.0, 0.0).finished()));
}

TEST_CASE("mean state for uniform populations on two qubits") {
  const auto d = SectorDecomposition::magnetization(2);
  const auto rho = lemma1_mean_state(AlphaVector::uniform(3), d);
  RealVector expected(4);
  expected << 1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3;
  CHECK(max_abs_diff(rho.matrix(), expected.cast<Complex>().asDiagonal().toDenseMatrix()) < 1e-15);
}

TEST_CASE("block observable expectation is the beta-weighted population") {
  const auto d = SectorDecomposition::magnetization(2);
  const BlockObservable o(d, (RealVector(3) << 1.0, 0.0, 0.0).finished());
  CHECK(block_observable_expectation(AlphaVector::uniform(3), o) == doctest::Approx(1.0 / 3));
  const auto m = BlockObservable::magnetization(d);
  const AlphaVector a = AlphaVector::checked((RealVector(3) << 0.2, 0.3, 0.5).finished());
  CHECK(block_observable_expectation(a, m) == doctest::Approx(0.2 * 2 - 0.5 * 2));
  const auto rho = lemma1_mean_state(a, d);
  CHECK((m.materialize() * rho.matrix()).trace().real() == doctest::Approx(block_observable_expectation(a, m)));
}

TEST_CASE("sector populations") {
  const auto d = SectorDecomposition::magnetization(3);
  const auto a = sector_populations(DensityMatrix::basis_state(3, 0b110), d);
  CHECK(a[2] == 1.0);
  RngStream rng(3);
  const auto rho = DensityMatrix::checked(random_density(3, rng));
  CHECK(sector_populations(rho, d).values().sum() == doctest::Approx(1.0));
  const auto u = block_haar_unitary(d, rng);
  CHECK(max_abs_diff(sector_populations(conjugate(u, rho), d).values().cast<Complex>(),
                     sector_populations(rho, d).values().cast<Complex>()) < 1e-12);
}

TEST_CASE("block-Haar average approaches the sector mean state") {
  RngStream rng(4);
  const int n = 2;
  const auto d = SectorDecomposition::magnetization(n);
  const auto rho = DensityMatrix::checked(random_density(n, rng));
  const auto target = lemma1_mean_state(sector_populations(rho, d), d);
  ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
  const int draws = 4000;
  for (int s = 0; s < draws; ++s) sum += conjugate(block_haar_unitary(d, rng), rho).matrix();
  CHECK(trace_distance(ComplexMatrix(sum / double(draws)), target.matrix()) < 0.03);
}

TEST_CASE("commutator_norm") {
  CHECK(commutator_norm(pauli::X(), pauli::Z()) == doctest::Approx(2.0));
  CHECK(commutator_norm(pauli::Z(), pauli::Z()) == 0.0);
}
