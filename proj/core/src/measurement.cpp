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

#include "qrclab/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qrc {

void ObservableSet::add(std::string label, ComplexMatrix matrix) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("observable must be square");
  const double scale = std::max(1.0, max_abs(matrix));
  if (hermiticity_error(matrix) > kStructuralTol * scale)
    throw std::invalid_argument("observable '" + label + "' is not Hermitian");
  if (std::find(labels_.begin(), labels_.end(), label) != labels_.end())
    throw std::invalid_argument("duplicate observable label '" + label + "'");
  labels_.push_back(std::move(label));
  matrices_.push_back(std::move(matrix));
}

std::size_t ObservableSet::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::invalid_argument("unknown observable '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

ObservableSet single_qubit_paulis(int n_qubits, const std::vector<int>& qubits) {
  if (n_qubits < 1) throw std::invalid_argument("single_qubit_paulis: n must be >= 1");
  ObservableSet set;
  const ComplexMatrix ops[3] = {pauli::X(), pauli::Y(), pauli::Z()};
  const char axes[3] = {'x', 'y', 'z'};
  for (int q : qubits)
    for (int a = 0; a < 3; ++a)
      set.add(std::string(1, axes[a]) + std::to_string(q), single_qubit_operator(n_qubits, q, ops[a]));
  return set;
}

ObservableSet single_qubit_paulis(int n_qubits) {
  std::vector<int> all(static_cast<std::size_t>(std::max(n_qubits, 0)));
  for (int q = 0; q < n_qubits; ++q) all[static_cast<std::size_t>(q)] = q;
  return single_qubit_paulis(n_qubits, all);
}

double exact_expectation(const DensityMatrix& rho, const ComplexMatrix& o) {
  if (o.rows() != rho.dim() || o.cols() != rho.dim())
    throw std::invalid_argument("exact_expectation: dimension mismatch");
  // Tr(rho O) = sum_ij rho_ij O_ji
  const Complex value = rho.matrix().cwiseProduct(o.transpose()).sum();
  const double tol = 1e-12 * static_cast<double>(rho.dim()) * std::max(1.0, max_abs(o));
  if (std::abs(value.imag()) > tol) {
    std::ostringstream msg;
    msg << "Tr(rho O) has imaginary part " << value.imag();
    throw InvariantViolation("real-expectation", msg.str());
  }
  return value.real();
}

RealVector exact_expectations(const DensityMatrix& rho, const ObservableSet& obs) {
  RealVector out(static_cast<Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) out(static_cast<Index>(i)) = exact_expectation(rho, obs[i]);
  return out;
}

ShotConfig ShotConfig::shots(long long n) {
  if (n < 1) throw std::invalid_argument("ShotConfig: n_shots must be >= 1");
  return ShotConfig{n};
}

double sampled_expectation(const DensityMatrix& rho, const ComplexMatrix& o, const ShotConfig& shots,
                           RngStream& rng) {
  if (shots.is_exact()) throw std::invalid_argument("sampled_expectation: shot count required");
  if (o.rows() != rho.dim()) throw std::invalid_argument("sampled_expectation: dimension mismatch");
  const HermitianEigen eig = herm_eig(o);
  const Index dim = rho.dim();

  RealVector probs(dim);
  for (Index j = 0; j < dim; ++j) {
    const auto v = eig.eigenvectors.col(j);
    probs(j) = (v.adjoint() * rho.matrix() * v)(0, 0).real();
    if (probs(j) < -kSpectralTol) {
      std::ostringstream msg;
      msg << "outcome probability " << probs(j) << " is negative";
      throw InvariantViolation("internal-consistency", msg.str());
    }
    probs(j) = std::max(probs(j), 0.0);
  }
  probs /= probs.sum();

  std::vector<double> cdf(static_cast<std::size_t>(dim));
  double acc = 0.0;
  for (Index j = 0; j < dim; ++j) cdf[static_cast<std::size_t>(j)] = (acc += probs(j));
  cdf.back() = 1.0;

  const long long n = *shots.n_shots;
  double total = 0.0;
  for (long long s = 0; s < n; ++s) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto j = static_cast<Index>(std::min<std::ptrdiff_t>(it - cdf.begin(), dim - 1));
    total += eig.eigenvalues(j);
  }
  return total / static_cast<double>(n);
}

RealVector estimate_expectations(const DensityMatrix& rho, const ObservableSet& obs,
                                 const ShotConfig& shots, RngStream& rng) {
  if (shots.is_exact()) return exact_expectations(rho, obs);
  RealVector out(static_cast<Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i)
    out(static_cast<Index>(i)) = sampled_expectation(rho, obs[i], shots, rng);
  return out;
}

// ---------------------------------------------------------------------------
// Readout

ReadoutModel train_readout(const RealMatrix& features, const RealVector& targets, double ridge_lambda) {
  const Index t = features.rows();
  const Index m = features.cols();
  if (t < 1) throw std::invalid_argument("train_readout: need at least one sample");
  if (targets.size() != t) throw std::invalid_argument("train_readout: target length mismatch");
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda))
    throw std::invalid_argument("train_readout: ridge_lambda must be nonnegative");

  // Centering removes the bias column from the penalised system.
  const RealVector x_mean = features.colwise().mean().transpose();
  const double y_mean = targets.mean();
  const RealMatrix xc = features.rowwise() - x_mean.transpose();
  const RealVector yc = targets.array() - y_mean;

  ReadoutModel model;
  model.ridge_lambda = ridge_lambda;
  if (m == 0) {
    model.weights = RealVector(0);
    model.bias = y_mean;
    return model;
  }
  RealMatrix gram = xc.transpose() * xc;
  gram.diagonal().array() += ridge_lambda;
  const RealVector rhs = xc.transpose() * yc;

  Eigen::LDLT<RealMatrix> ldlt(gram);
  const double scale = std::max(gram.diagonal().maxCoeff(), 1e-300);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14 ||
      ldlt.vectorD().cwiseAbs().minCoeff() < 1e-14 * scale) {
    throw NumericalError(
        "train_readout: normal matrix is singular; set ridge_lambda > 0");
  }
  model.weights = ldlt.solve(rhs);
  if (!model.weights.allFinite()) throw NumericalError("train_readout: non-finite weights");
  model.bias = y_mean - x_mean.dot(model.weights);
  return model;
}

RealVector predict(const ReadoutModel& model, const RealMatrix& features) {
  if (features.cols() != model.weights.size())
    throw std::invalid_argument("predict: feature width does not match model");
  RealVector out = features * model.weights;
  out.array() += model.bias;
  return out;
}

double mean_squared_error(const RealVector& predicted, const RealVector& target) {
  if (predicted.size() != target.size() || predicted.size() == 0)
    throw std::invalid_argument("mean_squared_error: length mismatch");
  return (predicted - target).squaredNorm() / static_cast<double>(target.size());
}

double squared_correlation(const RealVector& predicted, const RealVector& target) {
  if (predicted.size() != target.size() || predicted.size() < 2)
    throw std::invalid_argument("squared_correlation: length mismatch");
  const RealVector a = predicted.array() - predicted.mean();
  const RealVector b = target.array() - target.mean();
  const double denom = a.squaredNorm() * b.squaredNorm();
  if (denom <= 0.0) return 0.0;
  const double c = a.dot(b);
  return c * c / denom;
}

}  // namespace qrc
