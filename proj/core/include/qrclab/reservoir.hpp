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

// Erase-and-write reservoir: Ising scramblers, input encoding and dynamics.
//
// One step traces out the input qubits, writes the input state into those
// positions and evolves with a fixed unitary:
//
//   rho_{k+1} = U (rho_in (x) Tr_in{rho_k}) U^dagger
//
// Energies are in units of the coupling scale J_s; times in 1/J_s.

#include <optional>
#include <variant>
#include <vector>

#include "qrclab/measurement.hpp"
#include "qrclab/qla.hpp"
#include "qrclab/rng.hpp"

namespace qrc {

/// Fully connected transverse-field Ising model with on-site disorder.
struct IsingParams {
  int n_qubits = 2;
  double J_s = 1.0;   ///< couplings drawn from [-J_s/2, J_s/2]
  double h = 10.0;    ///< uniform field
  double W = 1e-2;    ///< disorder drawn from [-W, W]
  double dt = 10.0;   ///< time between inputs

  void validate() const;
};

/// Named (W, h) pairs for the thermal and many-body localized regimes.
enum class PhasePreset { ThermalMain, ThermalSm, Localized };

IsingParams apply_preset(IsingParams params, PhasePreset preset);
const char* preset_name(PhasePreset preset);
std::optional<PhasePreset> parse_preset(const std::string& name);

struct IsingDisorder {
  RealMatrix couplings;  ///< J_ij for i > j (lower triangle); rest zero
  RealVector fields;     ///< h_i
};

IsingDisorder sample_ising_disorder(const IsingParams& params, RngStream& rng);

/// H = sum_{i>j} J_ij X_i X_j + 1/2 sum_i (h + h_i) Z_i.
ComplexMatrix ising_hamiltonian(const IsingParams& params, const IsingDisorder& disorder);

struct IsingReservoir {
  IsingDisorder disorder;
  ComplexMatrix hamiltonian;
  UnitaryMatrix unitary;
};

IsingReservoir build_ising(const IsingParams& params, RngStream& rng);
IsingReservoir build_ising(const IsingParams& params, const IsingDisorder& disorder);

enum class InputEncoding {
  /// s -> sqrt(s)|0> + sqrt(1-s)|1> on a single input qubit.
  Amplitude,
};

class ReservoirConfig {
 public:
  ReservoirConfig(UnitaryMatrix unitary, std::vector<int> input_qubits = {0},
                  InputEncoding encoding = InputEncoding::Amplitude);

  int n_qubits() const { return n_qubits_; }
  const UnitaryMatrix& unitary() const { return unitary_; }
  const std::vector<int>& input_qubits() const { return input_qubits_; }
  int input_count() const { return static_cast<int>(input_qubits_.size()); }
  InputEncoding encoding() const { return encoding_; }

 private:
  int n_qubits_;
  UnitaryMatrix unitary_;
  std::vector<int> input_qubits_;
  InputEncoding encoding_;
};

/// Single-qubit amplitude encoding; s must lie in [0, 1].
ComplexVector encode_amplitude(double s);
DensityMatrix encode_input(double s);

/// One erase-and-write step with an arbitrary m-qubit input state.
DensityMatrix reservoir_step(const ReservoirConfig& config, const DensityMatrix& rho_r,
                             const DensityMatrix& rho_in);

/// Same map for a pure input state |psi><psi|; avoids forming the full
/// product operator.
DensityMatrix reservoir_step_pure(const ReservoirConfig& config, const DensityMatrix& rho_r,
                                  const ComplexVector& psi_in);

/// Either classical scalars (encoded per the config) or explicit states.
class InputSeries {
 public:
  static InputSeries scalars(std::vector<double> values);
  static InputSeries states(std::vector<DensityMatrix> values);

  std::size_t size() const;
  bool is_scalar() const { return std::holds_alternative<std::vector<double>>(data_); }
  const std::vector<double>& scalar_values() const { return std::get<std::vector<double>>(data_); }
  const std::vector<DensityMatrix>& state_values() const {
    return std::get<std::vector<DensityMatrix>>(data_);
  }

 private:
  explicit InputSeries(std::variant<std::vector<double>, std::vector<DensityMatrix>> d)
      : data_(std::move(d)) {}
  std::variant<std::vector<double>, std::vector<DensityMatrix>> data_;
};

struct TrajectoryOptions {
  ShotConfig shots = ShotConfig::exact();
  bool record_states = false;
};

struct Trajectory {
  std::vector<int> steps;     ///< 1-based step index of each recorded row
  RealMatrix expectations;    ///< rows: recorded steps, cols: observables
  std::vector<DensityMatrix> states;  ///< only when record_states
  DensityMatrix final_state;
};

/// Applies one step per input and records the observables after every step
/// past `washout`. `rng` is only drawn from for finite shot counts.
Trajectory run_trajectory(const ReservoirConfig& config, const InputSeries& inputs,
                          const DensityMatrix& rho_0, const ObservableSet& observables, int washout,
                          const TrajectoryOptions& options = {}, RngStream* rng = nullptr);

/// Haar-random pure state on n qubits.
DensityMatrix random_initial_state(int n_qubits, RngStream& rng);

}  // namespace qrc
