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

// Magnetization-sector machinery for S = sum_i sigma^z_i.
//
// Sector l holds the computational basis states of Hamming weight l, i.e. the
// S-eigenspace with eigenvalue n - 2l. Sectors are ordered by l ascending and
// every AlphaVector / BlockObservable layout follows that ordering.

#include <span>
#include <vector>

#include "qrclab/qla.hpp"
#include "qrclab/rng.hpp"

namespace qrc {

class SectorDecomposition {
 public:
  /// Hamming-weight sectors of n qubits, 1 <= n <= 14.
  static SectorDecomposition magnetization(int n_qubits);

  /// Joint eigenspaces of commuting diagonal operators, each given by its
  /// diagonal. Sectors are ordered by the first basis index they contain.
  static SectorDecomposition from_diagonal_symmetries(int n_qubits,
                                                      std::span<const RealVector> diagonals);

  int n_qubits() const { return n_qubits_; }
  Index dim() const { return static_cast<Index>(sector_of_.size()); }
  int sector_count() const { return static_cast<int>(sectors_.size()); }
  const std::vector<Index>& sector(int l) const;
  Index sector_dim(int l) const { return static_cast<Index>(sector(l).size()); }
  std::vector<Index> dims() const;
  int sector_of(Index basis_index) const { return sector_of_.at(static_cast<std::size_t>(basis_index)); }

 private:
  SectorDecomposition(int n_qubits, std::vector<std::vector<Index>> sectors);

  int n_qubits_;
  std::vector<std::vector<Index>> sectors_;
  std::vector<int> sector_of_;
};

SectorDecomposition magnetization_sectors(int n_qubits);

/// Sector populations alpha_l; nonnegative and summing to one.
class AlphaVector {
 public:
  static AlphaVector checked(RealVector values);
  static AlphaVector uniform(int sector_count);
  /// All weight in sector l.
  static AlphaVector point(int sector_count, int l);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int l) const { return values_(l); }
  const RealVector& values() const { return values_; }
  AlphaVector reversed() const;

 private:
  explicit AlphaVector(RealVector v) : values_(std::move(v)) {}
  RealVector values_;
};

/// Observable of the form sum_l beta_l P_l.
struct BlockObservable {
  SectorDecomposition decomposition;
  RealVector betas;

  BlockObservable(SectorDecomposition decomp, RealVector b);

  static BlockObservable magnetization(const SectorDecomposition& decomp);
  static BlockObservable parity(const SectorDecomposition& decomp);

  ComplexMatrix materialize() const;
};

ComplexMatrix sector_projector(const SectorDecomposition& decomp, int l);

/// Direct sum of independent Haar unitaries, one per sector.
UnitaryMatrix block_haar_unitary(const SectorDecomposition& decomp, RngStream& rng);

/// prod_i sigma^z_i as a diagonal matrix.
ComplexMatrix parity_operator(int n_qubits);

/// sum_i sigma^z_i as a diagonal matrix.
ComplexMatrix magnetization_operator(int n_qubits);

/// sum_l alpha_l P_l / D_l.
DensityMatrix lemma1_mean_state(const AlphaVector& alphas, const SectorDecomposition& decomp);

/// alpha_l = Tr{P_l rho}.
AlphaVector sector_populations(const DensityMatrix& rho, const SectorDecomposition& decomp);

/// sum_l alpha_l beta_l.
double block_observable_expectation(const AlphaVector& alphas, const BlockObservable& obs);

/// max |AB - BA| entrywise.
double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qrc
