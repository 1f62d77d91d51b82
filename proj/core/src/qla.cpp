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

#include "qrclab/qla.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qrc {

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  return max_abs(a - b);
}

double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermiticity_error: matrix not square");
  return max_abs(m - m.adjoint());
}

double unitarity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("unitarity_error: matrix not square");
  return max_abs(m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols()));
}

bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

int qubits_for_dim(Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    std::ostringstream msg;
    msg << "dimension " << dim << " is not a power of two >= 2";
    throw std::invalid_argument(msg.str());
  }
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix DensityMatrix::checked(ComplexMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("density matrix must be square");
  const int n = qubits_for_dim(m.rows());
  DensityMatrix rho(std::move(m), n);
  rho.validate();
  return rho;
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix m) {
  const int n = qubits_for_dim(m.rows());
  return DensityMatrix(std::move(m), n);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("pure state vector has zero norm");
  const ComplexVector v = psi / norm;
  return trusted(v * v.adjoint());
}

DensityMatrix DensityMatrix::basis_state(int n_qubits, Index index) {
  if (n_qubits < 1) throw std::invalid_argument("basis_state: n_qubits must be >= 1");
  const Index dim = Index{1} << n_qubits;
  if (index < 0 || index >= dim) throw std::invalid_argument("basis_state: index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m), n_qubits);
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("maximally_mixed: n_qubits must be >= 1");
  const Index dim = Index{1} << n_qubits;
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), n_qubits);
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return matrix_.squaredNorm();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void DensityMatrix::validate() const {
  if (!all_finite(matrix_)) throw InvariantViolation("finite", "density matrix has NaN/Inf entries");
  const double herm = hermiticity_error(matrix_);
  if (herm > kStructuralTol) {
    std::ostringstream msg;
    msg << "max |rho - rho^dagger| = " << herm;
    throw InvariantViolation("hermitian", msg.str());
  }
  const Complex tr = trace();
  if (std::abs(tr.real() - 1.0) > kStructuralTol || std::abs(tr.imag()) > 1e-12) {
    std::ostringstream msg;
    msg << "trace = " << tr;
    throw InvariantViolation("unit-trace", msg.str());
  }
  const double lmin = min_eigenvalue();
  if (lmin < -kSpectralTol) {
    std::ostringstream msg;
    msg << "minimum eigenvalue " << lmin;
    throw InvariantViolation("positive-semidefinite", msg.str());
  }
}

// ---------------------------------------------------------------------------
// UnitaryMatrix

UnitaryMatrix UnitaryMatrix::checked(ComplexMatrix m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("unitary must be a non-empty square matrix");
  if (!all_finite(m)) throw InvariantViolation("finite", "unitary has NaN/Inf entries");
  const double err = unitarity_error(m);
  if (err > kStructuralTol) {
    std::ostringstream msg;
    msg << "max |U^dagger U - I| = " << err;
    throw InvariantViolation("unitary", msg.str());
  }
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix UnitaryMatrix::trusted(ComplexMatrix m) { return UnitaryMatrix(std::move(m)); }

UnitaryMatrix UnitaryMatrix::identity(Index dim) {
  if (dim < 1) throw std::invalid_argument("identity: dim must be >= 1");
  return UnitaryMatrix(ComplexMatrix::Identity(dim, dim));
}

// ---------------------------------------------------------------------------
// Pauli matrices

namespace pauli {

ComplexMatrix I() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix X() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix Y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

ComplexMatrix Z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

// ---------------------------------------------------------------------------
// Tensor structure

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, Index max_dim) {
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  if (rows > max_dim || cols > max_dim) {
    std::ostringstream msg;
    msg << "kron: result " << rows << "x" << cols << " exceeds maximum dimension " << max_dim;
    throw SizeError(msg.str());
  }
  ComplexMatrix out(rows, cols);
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix single_qubit_operator(int n_qubits, int qubit, const ComplexMatrix& op) {
  if (n_qubits < 1 || qubit < 0 || qubit >= n_qubits)
    throw std::invalid_argument("single_qubit_operator: qubit index out of range");
  if (op.rows() != 2 || op.cols() != 2)
    throw std::invalid_argument("single_qubit_operator: operator must be 2x2");
  const Index dim = Index{1} << n_qubits;
  const int shift = n_qubits - 1 - qubit;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const Index bit = (i >> shift) & 1;
    const Index base = i & ~(Index{1} << shift);
    for (Index b = 0; b < 2; ++b) out(base | (b << shift), i) = op(b, bit);
  }
  return out;
}

Index gather_bits(Index index, int n_qubits, std::span<const int> qubits) {
  Index out = 0;
  for (int q : qubits) out = (out << 1) | ((index >> (n_qubits - 1 - q)) & 1);
  return out;
}

namespace {

void check_qubit_set(std::span<const int> qubits, int n_qubits, const char* who) {
  std::vector<bool> seen(static_cast<std::size_t>(n_qubits), false);
  for (int q : qubits) {
    if (q < 0 || q >= n_qubits) {
      std::ostringstream msg;
      msg << who << ": qubit index " << q << " out of range for " << n_qubits << " qubits";
      throw std::invalid_argument(msg.str());
    }
    if (seen[static_cast<std::size_t>(q)]) {
      std::ostringstream msg;
      msg << who << ": qubit index " << q << " repeated";
      throw std::invalid_argument(msg.str());
    }
    seen[static_cast<std::size_t>(q)] = true;
  }
}

}  // namespace

std::vector<int> complement_qubits(std::span<const int> qubits, int n_qubits) {
  std::vector<bool> in(static_cast<std::size_t>(n_qubits), false);
  for (int q : qubits) in[static_cast<std::size_t>(q)] = true;
  std::vector<int> rest;
  for (int q = 0; q < n_qubits; ++q)
    if (!in[static_cast<std::size_t>(q)]) rest.push_back(q);
  return rest;
}

Index scatter_bits(Index value, int n_qubits, std::span<const int> qubits) {
  Index out = 0;
  const auto k = static_cast<int>(qubits.size());
  for (int j = 0; j < k; ++j) {
    const Index bit = (value >> (k - 1 - j)) & 1;
    out |= bit << (n_qubits - 1 - qubits[static_cast<std::size_t>(j)]);
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> traced_qubits) {
  const int n = rho.n_qubits();
  check_qubit_set(traced_qubits, n, "partial_trace");
  if (traced_qubits.empty()) throw std::invalid_argument("partial_trace: no qubits to trace");
  if (static_cast<int>(traced_qubits.size()) >= n)
    throw std::invalid_argument("partial_trace: cannot trace out every qubit");

  const std::vector<int> kept = complement_qubits(traced_qubits, n);
  const Index kept_dim = Index{1} << kept.size();
  const Index traced_dim = Index{1} << traced_qubits.size();

  std::vector<Index> base(static_cast<std::size_t>(kept_dim));
  for (Index a = 0; a < kept_dim; ++a) base[static_cast<std::size_t>(a)] = scatter_bits(a, n, kept);
  std::vector<Index> offset(static_cast<std::size_t>(traced_dim));
  for (Index t = 0; t < traced_dim; ++t)
    offset[static_cast<std::size_t>(t)] = scatter_bits(t, n, traced_qubits);

  const ComplexMatrix& m = rho.matrix();
  ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
  for (Index b = 0; b < kept_dim; ++b) {
    for (Index a = 0; a < kept_dim; ++a) {
      Complex acc = 0.0;
      for (Index off : offset)
        acc += m(base[static_cast<std::size_t>(a)] | off, base[static_cast<std::size_t>(b)] | off);
      out(a, b) = acc;
    }
  }
  return DensityMatrix::trusted(std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> traced_qubits) {
  return partial_trace(rho, std::span<const int>(traced_qubits.begin(), traced_qubits.size()));
}

ComplexMatrix insert_subsystem(const ComplexMatrix& inserted, std::span<const int> positions,
                               const ComplexMatrix& rest) {
  const int m = qubits_for_dim(inserted.rows());
  const int r = qubits_for_dim(rest.rows());
  const int n = m + r;
  if (static_cast<int>(positions.size()) != m)
    throw std::invalid_argument("insert_subsystem: position count does not match inserted operator");
  check_qubit_set(positions, n, "insert_subsystem");
  const Index dim = Index{1} << n;
  if (dim > kDefaultMaxDim) throw SizeError("insert_subsystem: result exceeds maximum dimension");
  const std::vector<int> others = complement_qubits(positions, n);

  std::vector<Index> in_idx(static_cast<std::size_t>(dim)), rest_idx(static_cast<std::size_t>(dim));
  for (Index i = 0; i < dim; ++i) {
    in_idx[static_cast<std::size_t>(i)] = gather_bits(i, n, positions);
    rest_idx[static_cast<std::size_t>(i)] = gather_bits(i, n, others);
  }
  ComplexMatrix out(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    const Index aj = in_idx[static_cast<std::size_t>(j)];
    const Index bj = rest_idx[static_cast<std::size_t>(j)];
    for (Index i = 0; i < dim; ++i)
      out(i, j) = inserted(in_idx[static_cast<std::size_t>(i)], aj) *
                  rest(rest_idx[static_cast<std::size_t>(i)], bj);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral routines

HermitianEigen herm_eig(const ComplexMatrix& h) {
  if (h.rows() != h.cols() || h.rows() < 1)
    throw std::invalid_argument("herm_eig: matrix must be non-empty and square");
  if (!all_finite(h)) throw std::invalid_argument("herm_eig: matrix has NaN/Inf entries");
  const double scale = std::max(1.0, max_abs(h));
  if (hermiticity_error(h) > kStructuralTol * scale)
    throw std::invalid_argument("herm_eig: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("herm_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

UnitaryMatrix evolution_unitary(const HermitianEigen& eig, double dt) {
  const Index dim = eig.eigenvalues.size();
  ComplexVector phases(dim);
  for (Index j = 0; j < dim; ++j) phases(j) = std::polar(1.0, -eig.eigenvalues(j) * dt);
  ComplexMatrix u = eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
  return UnitaryMatrix::trusted(std::move(u));
}

UnitaryMatrix evolution_unitary(const ComplexMatrix& h, double dt) {
  return evolution_unitary(herm_eig(h), dt);
}

namespace {

ComplexMatrix ginibre(Index rows, Index cols, RngStream& rng) {
  ComplexMatrix g(rows, cols);
  const double s = std::sqrt(0.5);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(s * re, s * im);
    }
  return g;
}

// Q of a QR factorization with diag(R) made real-positive.
ComplexMatrix haar_q(const ComplexMatrix& g) {
  const Index rows = g.rows();
  const Index cols = g.cols();
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  const ComplexMatrix& r = qr.matrixQR();
  for (Index j = 0; j < cols; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    const Complex phase = mag > 0.0 ? d / mag : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

}  // namespace

UnitaryMatrix haar_unitary(Index dim, RngStream& rng) {
  if (dim <= 0) throw std::invalid_argument("haar_unitary: dim must be positive");
  if (dim > kDefaultMaxDim) throw SizeError("haar_unitary: dim exceeds maximum dimension");
  return UnitaryMatrix::trusted(haar_q(ginibre(dim, dim, rng)));
}

ComplexMatrix haar_isometry(Index dim, Index cols, RngStream& rng) {
  if (dim <= 0 || cols <= 0 || cols > dim)
    throw std::invalid_argument("haar_isometry: need 0 < cols <= dim");
  if (dim > kDefaultMaxDim) throw SizeError("haar_isometry: dim exceeds maximum dimension");
  return haar_q(ginibre(dim, cols, rng));
}

ComplexVector haar_state(Index dim, RngStream& rng) {
  if (dim <= 0) throw std::invalid_argument("haar_state: dim must be positive");
  ComplexVector v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  const ComplexMatrix diff = rho - sigma;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff, Eigen::EigenvaluesOnly);
  const double d = 0.5 * es.eigenvalues().cwiseAbs().sum();
  return std::clamp(d, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return trace_distance(rho.matrix(), sigma.matrix());
}

DensityMatrix conjugate(const UnitaryMatrix& u, const DensityMatrix& rho) {
  if (u.dim() != rho.dim()) throw std::invalid_argument("conjugate: dimension mismatch");
  ComplexMatrix tmp = u.matrix() * rho.matrix();
  ComplexMatrix out = tmp * u.matrix().adjoint();
  return DensityMatrix::trusted(std::move(out));
}

}  // namespace qrc
