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

#pragma once

// Dense complex linear algebra for operators on n-qubit Hilbert spaces.
//
// Qubit ordering: qubit 0 is the most significant bit of a basis index, so
// |q0 q1 ... q_{n-1}> has index q0 * 2^{n-1} + ... + q_{n-1}. kron() and
// partial_trace() follow this convention.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrclab/rng.hpp"

namespace qrc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Largest operator dimension any library routine will allocate (2^14).
inline constexpr Index kDefaultMaxDim = Index{1} << 14;

inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kSpectralTol = 1e-9;

/// Requested operator dimension exceeds the configured maximum.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical routine failed (singular system, non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violated one of its type invariants.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

/// Largest entrywise modulus.
double max_abs(const ComplexMatrix& m);
/// Largest entrywise modulus of a - b.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
/// Largest entrywise modulus of m - m^dagger.
double hermiticity_error(const ComplexMatrix& m);
/// Largest entrywise modulus of m^dagger m - I.
double unitarity_error(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);

/// Number of qubits for a power-of-two dimension; throws otherwise.
int qubits_for_dim(Index dim);

/// Unit-trace positive semidefinite Hermitian operator on n qubits.
class DensityMatrix {
 public:
  /// Validates all three invariants (Hermitian, unit trace, PSD).
  static DensityMatrix checked(ComplexMatrix m);
  /// Skips validation; for results of trace-preserving library maps.
  static DensityMatrix trusted(ComplexMatrix m);

  static DensityMatrix pure(const ComplexVector& psi);
  static DensityMatrix basis_state(int n_qubits, Index index);
  static DensityMatrix maximally_mixed(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }

  Complex trace() const { return matrix_.trace(); }
  double purity() const;
  double min_eigenvalue() const;

  /// Throws InvariantViolation naming the first failed invariant.
  void validate() const;

 private:
  DensityMatrix(ComplexMatrix m, int n_qubits) : matrix_(std::move(m)), n_qubits_(n_qubits) {}

  ComplexMatrix matrix_;
  int n_qubits_;
};

class UnitaryMatrix {
 public:
  static UnitaryMatrix checked(ComplexMatrix m);
  static UnitaryMatrix trusted(ComplexMatrix m);
  static UnitaryMatrix identity(Index dim);

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  ComplexMatrix adjoint() const { return matrix_.adjoint(); }

  UnitaryMatrix operator*(const UnitaryMatrix& other) const {
    return UnitaryMatrix(matrix_ * other.matrix_);
  }

 private:
  explicit UnitaryMatrix(ComplexMatrix m) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
};

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, Index max_dim = kDefaultMaxDim);

/// Embeds a single-qubit operator at `qubit` of an n-qubit register.
ComplexMatrix single_qubit_operator(int n_qubits, int qubit, const ComplexMatrix& op);

/// Extracts the bits of `index` belonging to `qubits` (in the listed order,
/// first listed = most significant) from an n-qubit basis index.
Index gather_bits(Index index, int n_qubits, std::span<const int> qubits);

/// Basis index whose bits on `qubits` (first = most significant) spell
/// `value`; all other bits zero.
Index scatter_bits(Index value, int n_qubits, std::span<const int> qubits);

/// Qubits of an n-qubit register not in `qubits`, ascending.
std::vector<int> complement_qubits(std::span<const int> qubits, int n_qubits);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> traced_qubits);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> traced_qubits);

/// Inverse of partial_trace for product states: places `inserted` on
/// `positions` of an n-qubit register and `rest` on the remaining qubits in
/// their original order.
ComplexMatrix insert_subsystem(const ComplexMatrix& inserted, std::span<const int> positions,
                               const ComplexMatrix& rest);

struct HermitianEigen {
  RealVector eigenvalues;  // ascending
  ComplexMatrix eigenvectors;
};

HermitianEigen herm_eig(const ComplexMatrix& h);

/// Time-evolution operator exp(-i h dt) via eigendecomposition.
UnitaryMatrix evolution_unitary(const ComplexMatrix& h, double dt);
UnitaryMatrix evolution_unitary(const HermitianEigen& eig, double dt);

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal moved into Q.
UnitaryMatrix haar_unitary(Index dim, RngStream& rng);

/// First `cols` columns of a Haar-random dim x dim unitary.
ComplexMatrix haar_isometry(Index dim, Index cols, RngStream& rng);

/// Haar-random pure state vector.
ComplexVector haar_state(Index dim, RngStream& rng);

/// Sum of |eigenvalues(rho - sigma)| / 2.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// U rho U^dagger.
DensityMatrix conjugate(const UnitaryMatrix& u, const DensityMatrix& rho);

}  // namespace qrc
