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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "helpers.hpp"

using namespace qrc;
using qrc::test::mat2;
using qrc::test::random_density;
using qrc::test::random_hermitian;

namespace {

std::string invariant_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const InvariantViolation& e) {
    return e.invariant();
  }
  return "";
}

}  // namespace

TEST_CASE("pauli algebra") {
  const Complex i(0, 1);
  CHECK(max_abs_diff(pauli::X() * pauli::X(), pauli::I()) == 0.0);
  CHECK(max_abs_diff(pauli::X() * pauli::Y(), i * pauli::Z()) < 1e-15);
  CHECK(max_abs_diff(pauli::Z(), mat2(1, 0, 0, -1)) == 0.0);
}

TEST_CASE("kron of X and Z matches the hand-written matrix") {
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 2) = 1;
  expected(1, 3) = -1;
  expected(2, 0) = 1;
  expected(3, 1) = -1;
  CHECK(max_abs_diff(kron(pauli::X(), pauli::Z()), expected) == 0.0);
}

TEST_CASE("kron rejects oversized results") {
  const ComplexMatrix big = ComplexMatrix::Identity(256, 256);
  CHECK_THROWS_AS(kron(big, big, 1 << 14), SizeError);
}

TEST_CASE("single_qubit_operator puts qubit 0 on the most significant bit") {
  CHECK(max_abs_diff(single_qubit_operator(2, 0, pauli::Z()), kron(pauli::Z(), pauli::I())) == 0.0);
  CHECK(max_abs_diff(single_qubit_operator(2, 1, pauli::Z()), kron(pauli::I(), pauli::Z())) == 0.0);
  const ComplexMatrix z1 = single_qubit_operator(3, 1, pauli::Z());
  CHECK(z1(0b000, 0b000).real() == 1.0);
  CHECK(z1(0b010, 0b010).real() == -1.0);
  CHECK(z1(0b100, 0b100).real() == 1.0);
}

TEST_CASE("gather and scatter bits are inverse on the selected qubits") {
  const std::vector<int> q{0, 2};
  CHECK(gather_bits(0b101, 3, q) == 0b11);
  CHECK(gather_bits(0b100, 3, q) == 0b10);
  CHECK(scatter_bits(0b01, 3, q) == 0b001);
  CHECK(scatter_bits(0b10, 3, q) == 0b100);
  for (Index v = 0; v < 4; ++v) CHECK(gather_bits(scatter_bits(v, 3, q), 3, q) == v);
  CHECK(complement_qubits(q, 3) == std::vector<int>{1});
}

TEST_CASE("partial trace of a Bell state is maximally mixed") {
  ComplexVector bell = ComplexVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const auto rho = DensityMatrix::pure(bell);
  CHECK(max_abs_diff(partial_trace(rho, {1}).matrix(), pauli::I() / 2.0) < 1e-15);
  CHECK(max_abs_diff(partial_trace(rho, {0}).matrix(), pauli::I() / 2.0) < 1e-15);
}

TEST_CASE("partial trace of a product state returns the factor") {
  RngStream rng(1);
  const ComplexMatrix a = random_density(1, rng), b = random_density(2, rng);
  const auto rho = DensityMatrix::checked(kron(a, b));
  CHECK(max_abs_diff(partial_trace(rho, {1, 2}).matrix(), a) < 1e-14);
  CHECK(max_abs_diff(partial_trace(rho, {0}).matrix(), b) < 1e-14);
}

TEST_CASE("partial trace over a middle qubit") {
  RngStream rng(2);
  const ComplexMatrix a = random_density(1, rng), b = random_density(1, rng), c = random_density(1, rng);
  const auto rho = DensityMatrix::checked(kron(kron(a, b), c));
  CHECK(max_abs_diff(partial_trace(rho, {1}).matrix(), kron(a, c)) < 1e-14);
}

TEST_CASE("insert_subsystem matches kron for leading and trailing positions") {
  RngStream rng(3);
  const ComplexMatrix in = random_density(1, rng), rest = random_density(2, rng);
  const std::vector<int> first{0}, last{2};
  CHECK(max_abs_diff(insert_subsystem(in, first, rest), kron(in, rest)) < 1e-15);
  CHECK(max_abs_diff(insert_subsystem(in, last, rest), kron(rest, in)) < 1e-15);
}

TEST_CASE("density matrix validation names the failed invariant") {
  CHECK(invariant_of([] { DensityMatrix::checked(mat2(0.5, 0.1, 0.2, 0.5)); }) == "hermitian");
  CHECK(invariant_of([] { DensityMatrix::checked(mat2(0.6, 0, 0, 0.6)); }) == "unit-trace");
  CHECK(invariant_of([] { DensityMatrix::checked(mat2(1.2, 0, 0, -0.2)); }) == "positive-semidefinite");
  CHECK(invariant_of([] { DensityMatrix::checked(mat2(NAN, 0, 0, 1)); }) == "finite");
  CHECK(invariant_of([] { UnitaryMatrix::checked(mat2(1, 1, 0, 1)); }) == "unitary");
  CHECK_NOTHROW(DensityMatrix::checked(mat2(0.5, 0.5, 0.5, 0.5)));
}

TEST_CASE("density matrix constructors") {
  const auto b = DensityMatrix::basis_state(3, 5);
  CHECK(b.n_qubits() == 3);
  CHECK(b.matrix()(5, 5).real() == 1.0);
  CHECK(b.purity() == doctest::Approx(1.0));
  const auto m = DensityMatrix::maximally_mixed(3);
  CHECK(m.purity() == doctest::Approx(1.0 / 8));
  CHECK(m.min_eigenvalue() == doctest::Approx(1.0 / 8));
  CHECK_THROWS(DensityMatrix::checked(ComplexMatrix::Identity(3, 3) / 3.0));
}

TEST_CASE("herm_eig of X") {
  const auto e = herm_eig(pauli::X());
  CHECK(e.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(e.eigenvalues(1) == doctest::Approx(1.0));
}

TEST_CASE("herm_eig reconstructs a random Hermitian matrix") {
  RngStream rng(4);
  const ComplexMatrix h = random_hermitian(16, rng);
  const auto e = herm_eig(h);
  const ComplexMatrix back = e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint();
  CHECK(max_abs_diff(back, h) < 1e-12);
  CHECK(unitarity_error(e.eigenvectors) < 1e-12);
  for (Index k = 1; k < 16; ++k) CHECK(e.eigenvalues(k) >= e.eigenvalues(k - 1));
}

TEST_CASE("herm_eig rejects non-Hermitian input") {
  CHECK_THROWS(herm_eig(mat2(0, 1, 0, 0)));
}

TEST_CASE("evolution of Z over a quarter period") {
  const Complex i(0, 1);
  const auto u = evolution_unitary(pauli::Z(), std::numbers::pi / 2);
  CHECK(max_abs_diff(u.matrix(), mat2(-i, 0, 0, i)) < 1e-15);
}

TEST_CASE("evolution unitaries form a one-parameter group") {
  RngStream rng(5);
  const ComplexMatrix h = random_hermitian(8, rng);
  const auto eig = herm_eig(h);
  const auto u1 = evolution_unitary(eig, 0.7), u2 = evolution_unitary(eig, 1.9), u12 = evolution_unitary(eig, 2.6);
  CHECK(max_abs_diff((u1 * u2).matrix(), u12.matrix()) < 1e-12);
  CHECK(unitarity_error(u12.matrix()) < 1e-12);
  CHECK(max_abs_diff(evolution_unitary(h, 0.0).matrix(), ComplexMatrix::Identity(8, 8)) < 1e-14);
}

TEST_CASE("haar unitaries are unitary and reproducible") {
  RngStream a(6), b(6);
  const auto ua = haar_unitary(16, a), ub = haar_unitary(16, b);
  CHECK(unitarity_error(ua.matrix()) < 1e-12);
  CHECK(max_abs_diff(ua.matrix(), ub.matrix()) == 0.0);
  const ComplexMatrix v = haar_isometry(16, 4, a);
  CHECK(max_abs_diff(v.adjoint() * v, ComplexMatrix::Identity(4, 4)) < 1e-12);
  CHECK(haar_state(16, a).norm() == doctest::Approx(1.0));
}

TEST_CASE("haar matrix elements follow Beta(1, D-1)") {
  // |U_00|^2 for D-dimensional Haar U has CDF 1 - (1 - x)^(D-1),
  // mean 1/D and second moment 2/(D(D+1)).
  RngStream rng(7);
  const int D = 4, samples = 100000;
  std::vector<double> x(samples);
  double m1 = 0, m2 = 0;
  for (int s = 0; s < samples; ++s) {
    const auto u = haar_unitary(D, rng);
    x[s] = std::norm(u.matrix()(0, 0));
    m1 += x[s];
    m2 += x[s] * x[s];
  }
  m1 /= samples;
  m2 /= samples;
  CHECK(m1 == doctest::Approx(1.0 / D).epsilon(0.01));
  CHECK(m2 == doctest::Approx(2.0 / (D * (D + 1))).epsilon(0.02));
  std::sort(x.begin(), x.end());
  double ks = 0;
  for (int s = 0; s < samples; ++s) {
    const double cdf = 1.0 - std::pow(1.0 - x[s], D - 1);
    ks = std::max({ks, std::abs(cdf - double(s) / samples), std::abs(cdf - double(s + 1) / samples)});
  }
  CHECK(ks < 0.02);
}

TEST_CASE("haar unitaries have zero mean entries") {
  RngStream rng(8);
  ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
  for (int s = 0; s < 20000; ++s) sum += haar_unitary(4, rng).matrix();
  CHECK(max_abs(sum / 20000.0) < 0.02);
}

TEST_CASE("trace distance") {
  const auto zero = DensityMatrix::basis_state(1, 0), one = DensityMatrix::basis_state(1, 1);
  const auto mixed = DensityMatrix::maximally_mixed(1);
  CHECK(trace_distance(zero, one) == doctest::Approx(1.0));
  CHECK(trace_distance(zero, zero) == doctest::Approx(0.0));
  CHECK(trace_distance(zero, mixed) == doctest::Approx(0.5));
  RngStream rng(9);
  const auto a = DensityMatrix::checked(random_density(3, rng));
  const auto b = DensityMatrix::checked(random_density(3, rng));
  const auto c = DensityMatrix::checked(random_density(3, rng));
  CHECK(trace_distance(a, b) == doctest::Approx(trace_distance(b, a)));
  CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12);
  const auto u = haar_unitary(8, rng);
  CHECK(trace_distance(conjugate(u, a), conjugate(u, b)) == doctest::Approx(trace_distance(a, b)));
}

TEST_CASE("qubits_for_dim") {
  CHECK(qubits_for_dim(2) == 1);
  CHECK(qubits_for_dim(8) == 3);
  CHECK_THROWS(qubits_for_dim(6));
}
