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

#include "qrclab/symmetry.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <sstream>

namespace qrc {

SectorDecomposition::SectorDecomposition(int n_qubits, std::vector<std::vector<Index>> sectors)
    : n_qubits_(n_qubits), sectors_(std::move(sectors)) {
  sector_of_.assign(std::size_t{1} << n_qubits, -1);
  for (std::size_t l = 0; l < sectors_.size(); ++l)
    for (Index i : sectors_[l]) sector_of_[static_cast<std::size_t>(i)] = static_cast<int>(l);
}

SectorDecomposition SectorDecomposition::magnetization(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 14) {
    std::ostringstream msg;
    msg << "magnetization_sectors: n = " << n_qubits << " outside [1, 14]";
    throw std::invalid_argument(msg.str());
  }
  std::vector<std::vector<Index>> sectors(static_cast<std::size_t>(n_qubits) + 1);
  const Index dim = Index{1} << n_qubits;
  for (Index i = 0; i < dim; ++i)
    sectors[static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(i)))].push_back(i);
  return SectorDecomposition(n_qubits, std::move(sectors));
}

SectorDecomposition SectorDecomposition::from_diagonal_symmetries(
    int n_qubits, std::span<const RealVector> diagonals) {
  if (n_qubits < 1 || n_qubits > 14)
    throw std::invalid_argument("from_diagonal_symmetries: n outside [1, 14]");
  const Index dim = Index{1} << n_qubits;
  for (const RealVector& d : diagonals)
    if (d.size() != dim) throw std::invalid_argument("from_diagonal_symmetries: diagonal length mismatch");

  // Eigenvalues are compared after rounding to 1e-9.
  std::map<std::vector<long long>, std::size_t> key_to_sector;
  std::vector<std::vector<Index>> sectors;
  for (Index i = 0; i < dim; ++i) {
    std::vector<long long> key;
    key.reserve(diagonals.size());
    for (const RealVector& d : diagonals) key.push_back(std::llround(d(i) * 1e9));
    auto [it, inserted] = key_to_sector.try_emplace(std::move(key), sectors.size());
    if (inserted) sectors.emplace_back();
    sectors[it->second].push_back(i);
  }
  return SectorDecomposition(n_qubits, std::move(sectors));
}

const std::vector<Index>& SectorDecomposition::sector(int l) const {
  if (l < 0 || l >= sector_count()) {
    std::ostringstream msg;
    msg << "sector index " << l << " outside [0, " << sector_count() - 1 << "]";
    throw std::invalid_argument(msg.str());
  }
  return sectors_[static_cast<std::size_t>(l)];
}

std::vector<Index> SectorDecomposition::dims() const {
  std::vector<Index> out;
  out.reserve(sectors_.size());
  for (const auto& s : sectors_) out.push_back(static_cast<Index>(s.size()));
  return out;
}

SectorDecomposition magnetization_sectors(int n_qubits) {
  return SectorDecomposition::magnetization(n_qubits);
}

// ---------------------------------------------------------------------------

AlphaVector AlphaVector::checked(RealVector values) {
  if (values.size() == 0) throw std::invalid_argument("AlphaVector: empty");
  for (Index l = 0; l < values.size(); ++l) {
    const double a = values(l);
    if (!std::isfinite(a) || a < -1e-12 || a > 1.0 + 1e-12) {
      std::ostringstream msg;
      msg << "AlphaVector: alpha_" << l << " = " << a << " outside [0, 1]";
      throw std::invalid_argument(msg.str());
    }
  }
  const double total = values.sum();
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "AlphaVector: populations sum to " << total;
    throw std::invalid_argument(msg.str());
  }
  return AlphaVector(std::move(values));
}

AlphaVector AlphaVector::uniform(int sector_count) {
  if (sector_count < 1) throw std::invalid_argument("AlphaVector: sector_count must be >= 1");
  return AlphaVector(RealVector::Constant(sector_count, 1.0 / sector_count));
}

AlphaVector AlphaVector::point(int sector_count, int l) {
  if (sector_count < 1 || l < 0 || l >= sector_count)
    throw std::invalid_argument("AlphaVector::point: sector out of range");
  RealVector v = RealVector::Zero(sector_count);
  v(l) = 1.0;
  return AlphaVector(std::move(v));
}

AlphaVector AlphaVector::reversed() const { return AlphaVector(values_.reverse()); }

// ---------------------------------------------------------------------------

BlockObservable::BlockObservable(SectorDecomposition decomp, RealVector b)
    : decomposition(std::move(decomp)), betas(std::move(b)) {
  if (betas.size() != decomposition.sector_count())
    throw std::invalid_argument("BlockObservable: one beta per sector required");
}

BlockObservable BlockObservable::magnetization(const SectorDecomposition& decomp) {
  const int n = decomp.n_qubits();
  RealVector b(decomp.sector_count());
  for (int l = 0; l < decomp.sector_count(); ++l) b(l) = n - 2.0 * l;
  return BlockObservable(decomp, std::move(b));
}

BlockObservable BlockObservable::parity(const SectorDecomposition& decomp) {
  RealVector b(decomp.sector_count());
  for (int l = 0; l < decomp.sector_count(); ++l) b(l) = (l % 2 == 0) ? 1.0 : -1.0;
  return BlockObservable(decomp, std::move(b));
}

ComplexMatrix BlockObservable::materialize() const {
  const Index dim = decomposition.dim();
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int l = 0; l < decomposition.sector_count(); ++l)
    for (Index i : decomposition.sector(l)) m(i, i) = betas(l);
  return m;
}

ComplexMatrix sector_projector(const SectorDecomposition& decomp, int l) {
  const auto& indices = decomp.sector(l);
  const Index dim = decomp.dim();
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  for (Index i : indices) p(i, i) = 1.0;
  return p;
}

UnitaryMatrix block_haar_unitary(const SectorDecomposition& decomp, RngStream& rng) {
  const Index dim = decomp.dim();
  ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
  for (int l = 0; l < decomp.sector_count(); ++l) {
    const auto& idx = decomp.sector(l);
    const UnitaryMatrix block = haar_unitary(static_cast<Index>(idx.size()), rng);
    for (std::size_t b = 0; b < idx.size(); ++b)
      for (std::size_t a = 0; a < idx.size(); ++a)
        u(idx[a], idx[b]) = block.matrix()(static_cast<Index>(a), static_cast<Index>(b));
  }
  return UnitaryMatrix::trusted(std::move(u));
}

ComplexMatrix parity_operator(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("parity_operator: n must be >= 1");
  const Index dim = Index{1} << n_qubits;
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i)
    p(i, i) = (std::popcount(static_cast<std::uint64_t>(i)) % 2 == 0) ? 1.0 : -1.0;
  return p;
}

ComplexMatrix magnetization_operator(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("magnetization_operator: n must be >= 1");
  const Index dim = Index{1} << n_qubits;
  ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i)
    s(i, i) = n_qubits - 2.0 * std::popcount(static_cast<std::uint64_t>(i));
  return s;
}

DensityMatrix lemma1_mean_state(const AlphaVector& alphas, const SectorDecomposition& decomp) {
  if (alphas.size() != decomp.sector_count())
    throw std::invalid_argument("lemma1_mean_state: alpha length does not match sector count");
  // Re-validate: AlphaVector may have been built from a trusted path.
  AlphaVector::checked(alphas.values());
  const Index dim = decomp.dim();
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int l = 0; l < decomp.sector_count(); ++l) {
    const double w = alphas[l] / static_cast<double>(decomp.sector_dim(l));
    for (Index i : decomp.sector(l)) m(i, i) = w;
  }
  return DensityMatrix::trusted(std::move(m));
}

AlphaVector sector_populations(const DensityMatrix& rho, const SectorDecomposition& decomp) {
  if (rho.dim() != decomp.dim())
    throw std::invalid_argument("sector_populations: dimension mismatch");
  RealVector a(decomp.sector_count());
  for (int l = 0; l < decomp.sector_count(); ++l) {
    double s = 0.0;
    for (Index i : decomp.sector(l)) s += rho.matrix()(i, i).real();
    // Round-off can leave populations a few ulps below zero.
    a(l) = (s < 0.0 && s > -1e-12) ? 0.0 : s;
  }
  return AlphaVector::checked(std::move(a));
}

double block_observable_expectation(const AlphaVector& alphas, const BlockObservable& obs) {
  if (alphas.size() != obs.betas.size())
    throw std::invalid_argument("block_observable_expectation: length mismatch");
  return alphas.values().dot(obs.betas);
}

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
  return max_abs(a * b - b * a);
}

}  // namespace qrc
