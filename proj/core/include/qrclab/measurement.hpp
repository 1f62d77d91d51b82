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

// Observables, expectation estimation and the linear readout layer.

#include <optional>
#include <string>
#include <vector>

#include "qrclab/qla.hpp"
#include "qrclab/rng.hpp"

namespace qrc {

/// Labelled Hermitian observables. Labels are unique; single-qubit Paulis
/// use "<axis><qubit>", e.g. "z3".
class ObservableSet {
 public:
  ObservableSet() = default;

  void add(std::string label, ComplexMatrix matrix);

  std::size_t size() const { return matrices_.size(); }
  bool empty() const { return matrices_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<ComplexMatrix>& matrices() const { return matrices_; }
  const ComplexMatrix& operator[](std::size_t i) const { return matrices_[i]; }
  /// Position of `label`; throws if absent.
  std::size_t index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::vector<ComplexMatrix> matrices_;
};

/// sigma^x, sigma^y, sigma^z on every qubit, ordered x0 y0 z0 x1 ...
ObservableSet single_qubit_paulis(int n_qubits);

/// Paulis on a chosen subset of qubits, same ordering.
ObservableSet single_qubit_paulis(int n_qubits, const std::vector<int>& qubits);

double exact_expectation(const DensityMatrix& rho, const ComplexMatrix& o);
RealVector exact_expectations(const DensityMatrix& rho, const ObservableSet& obs);

/// Number of projective measurements per estimate, or exact evaluation.
struct ShotConfig {
  std::optional<long long> n_shots;

  static ShotConfig exact() { return {}; }
  static ShotConfig shots(long long n);
  bool is_exact() const { return !n_shots.has_value(); }
};

/// Mean of n_shots projective measurements of `o` on `rho`.
double sampled_expectation(const DensityMatrix& rho, const ComplexMatrix& o, const ShotConfig& shots,
                           RngStream& rng);

/// Exact values when `shots` is exact, otherwise one sampled estimate per
/// observable.
RealVector estimate_expectations(const DensityMatrix& rho, const ObservableSet& obs,
                                 const ShotConfig& shots, RngStream& rng);

inline constexpr double kDefaultRidge = 1e-8;

/// y = weights . x + bias.
struct ReadoutModel {
  RealVector weights;
  double bias = 0.0;
  double ridge_lambda = 0.0;
};

/// Ridge regression with an unpenalised bias column. Rows of `features` are
/// time steps.
ReadoutModel train_readout(const RealMatrix& features, const RealVector& targets,
                           double ridge_lambda = kDefaultRidge);

RealVector predict(const ReadoutModel& model, const RealMatrix& features);

double mean_squared_error(const RealVector& predicted, const RealVector& target);

/// Squared Pearson correlation between prediction and target.
double squared_correlation(const RealVector& predicted, const RealVector& target);

}  // namespace qrc
