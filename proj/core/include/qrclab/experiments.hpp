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

// Seeded ensemble experiments and the analytic population recurrence.
//
// Every realization draws from its own RngStream child keyed by
// (n, realization), and results are stored in fixed slots, so the output does
// not depend on the number of worker threads.

#include <functional>
#include <string>
#include <vector>

#include "qrclab/measurement.hpp"
#include "qrclab/qla.hpp"
#include "qrclab/reservoir.hpp"
#include "qrclab/rng.hpp"
#include "qrclab/symmetry.hpp"

namespace qrc {

// ---------------------------------------------------------------------------
// Utilities

/// Runs body(0..count-1) on up to `threads` workers. The first exception (by
/// index) is rethrown after all workers finish.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Unbiased sample variance; zero for fewer than two values.
double sample_variance(const Eigen::Ref<const RealVector>& values);

enum class ScramblerKind { Ising, Identity, Haar, BlockHaar };
const char* scrambler_name(ScramblerKind kind);

/// Scrambling unitary on n qubits. `ising` supplies (J_s, h, W, dt); its
/// n_qubits is overridden.
UnitaryMatrix sample_scrambler(ScramblerKind kind, int n_qubits, const IsingParams& ising, RngStream& rng);

// ---------------------------------------------------------------------------
// Sector-population recurrence under repeated injection of a basis state.

/// One step of the population recurrence for the block-symmetric scrambler
/// with |1><1| (input_bit = 1) or |0><0| (input_bit = 0) injected.
AlphaVector alpha_recurrence_step(const AlphaVector& alphas, int input_bit);

/// alphas followed by `steps` recurrence steps (steps + 1 entries).
std::vector<AlphaVector> alpha_trajectory(const AlphaVector& initial, int steps, int input_bit);

/// Smallest k with 1 - alpha_n^k < epsilon, starting from uniform
/// populations under constant input_bit = 1.
int alpha_convergence_time(int n_qubits, double epsilon);

/// Monte Carlo sector populations of the erase-and-write map with a fresh
/// block-Haar unitary at every step, starting from Haar-random pure states.
struct PopulationEnsemble {
  RealMatrix mean;       ///< rows: step 0..steps, cols: sector
  RealMatrix std_error;  ///< standard error of each mean
  int draws = 0;
};

PopulationEnsemble simulate_sector_populations(int n_qubits, int steps, int draws, int input_bit,
                                               const RngStream& rng, int threads = 1);

// ---------------------------------------------------------------------------
// Concentration of single-qubit expectation values.

struct ConcentrationConfig {
  std::vector<int> ns{3, 4, 5, 6, 7};
  int realizations = 100;
  int washout = 200;
  int measure_steps = 200;
  IsingParams ising{};
  ScramblerKind scrambler = ScramblerKind::Ising;
  int probe_qubit = 1;  ///< fixed non-input qubit
  ShotConfig shots = ShotConfig::exact();
  int threads = 1;
};

struct ConcentrationSample {
  int n;
  int realization;
  std::string observable;
  double variance;
};

struct ConcentrationRow {
  int n;
  std::string observable;
  double mean_variance;
  int realization_count;
};

struct ConcentrationResult {
  std::vector<ConcentrationRow> rows;
  std::vector<ConcentrationSample> samples;

  /// Throws if (n, observable) is absent.
  double mean_variance(int n, const std::string& observable) const;
};

ConcentrationResult run_concentration(const ConcentrationConfig& config, const RngStream& rng);

// ---------------------------------------------------------------------------
// Echo-state property: distance between trajectories from two initial states.

struct PhaseSetting {
  std::string label;
  double W;
  double h;
};

PhaseSetting phase_setting(PhasePreset preset);

struct EchoStateConfig {
  std::vector<int> ns{7};
  int realizations = 20;
  int inputs_count = 500;
  std::vector<PhaseSetting> phases{phase_setting(PhasePreset::ThermalMain),
                                   phase_setting(PhasePreset::Localized)};
  double threshold = 1e-10;
  IsingParams ising{};
  /// Record the mean distance every this many steps (the final step always).
  int record_every = 1;
  int threads = 1;
};

struct EchoCurveRow {
  int n;
  std::string phase;
  double W;
  double h;
  int step;
  double mean_trace_distance;
};

struct ConvergedCountRow {
  int n;
  std::string phase;
  int realization;
  long long converged;  ///< N_c
};

struct EchoStateResult {
  std::vector<EchoCurveRow> curves;
  std::vector<ConvergedCountRow> counts;

  double final_mean_distance(int n, const std::string& phase) const;
  double mean_converged(int n, const std::string& phase) const;
};

EchoStateResult run_echo_state(const EchoStateConfig& config, const RngStream& rng);

/// Real and imaginary parts of (a - b) entries with modulus below threshold.
long long count_converged_entries(const ComplexMatrix& a, const ComplexMatrix& b, double threshold);

// ---------------------------------------------------------------------------
// Discrimination of constant |0> and |1> input series.

struct DiscriminationConfig {
  std::vector<int> ns{4, 6, 8};
  int realizations = 100;
  int series_length = 1000;
  /// Scrambler reported under the "symmetric" label.
  ScramblerKind symmetric_scrambler = ScramblerKind::BlockHaar;
  bool include_symmetric = true;
  bool include_haar = true;
  IsingParams ising{};
  int threads = 1;
};

struct DiscriminationRow {
  int n;
  std::string scrambler;  ///< "symmetric" or "haar"
  int input_class;        ///< 0 or 1
  int realization;
  int qubit;
  double expectation;
};

struct DiscriminationResult {
  std::vector<DiscriminationRow> rows;

  double class_mean(int n, const std::string& scrambler, int input_class) const;
  /// Mean over realizations of |<sz>_0 - <sz>_1| (same unitary and qubit).
  double mean_paired_gap(int n, const std::string& scrambler) const;
  /// Fraction of realizations within tol of the fully polarized value
  /// (+1 for class 0, -1 for class 1).
  double fraction_polarized(int n, const std::string& scrambler, int input_class, double tol) const;
};

DiscriminationResult run_discrimination(const DiscriminationConfig& config, const RngStream& rng);

// ---------------------------------------------------------------------------
// Monte Carlo checks of the block-Haar mean state and Haar variance scaling.

struct Lemma1Config {
  int n_qubits = 3;
  std::vector<long long> checkpoints{100, 1000, 10000};
  int repeats = 10;  ///< independent runs averaged at each checkpoint
  int threads = 1;
};

struct Lemma1Row {
  long long samples;
  double mean_trace_distance;
  double std_error;
};

/// Trace distance between the running mean of U rho U^dagger (block-Haar U)
/// and the predicted direct-sum state, for a random pure rho per repeat.
std::vector<Lemma1Row> verify_lemma1(const Lemma1Config& config, const RngStream& rng);

/// Same check for a caller-supplied state and a single run.
std::vector<Lemma1Row> verify_lemma1(const DensityMatrix& rho, const std::vector<long long>& checkpoints,
                                     const RngStream& rng);

enum class UnitaryEnsemble { Haar, BlockHaar };

struct VarianceScalingConfig {
  std::vector<int> ns{2, 3, 4, 5, 6, 7};
  int samples = 10000;
  UnitaryEnsemble ensemble = UnitaryEnsemble::Haar;
  std::string observable_label = "z1";
  std::function<ComplexMatrix(int)> observable;  ///< defaults to sigma^z on qubit 1
  std::function<DensityMatrix(int)> state;       ///< defaults to |0><0| (x) I/2^{n-1}
  int threads = 1;
};

struct VarianceRow {
  int n;
  std::string ensemble;
  std::string observable;
  double mean;
  double variance;
};

std::vector<VarianceRow> verify_variance_scaling(const VarianceScalingConfig& config, const RngStream& rng);

/// |0><0| on qubit 0 with the remaining qubits maximally mixed.
DensityMatrix injected_mixed_state(int n_qubits);

}  // namespace qrc
