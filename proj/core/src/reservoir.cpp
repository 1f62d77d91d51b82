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

#include "qrclab/reservoir.hpp"

#include <cmath>
#include <sstream>

namespace qrc {

void IsingParams::validate() const {
  std::ostringstream msg;
  if (n_qubits < 2) msg << "n_qubits must be >= 2 (got " << n_qubits << ")";
  else if (!(J_s > 0.0)) msg << "J_s must be positive (got " << J_s << ")";
  else if (!(W >= 0.0)) msg << "W must be nonnegative (got " << W << ")";
  else if (!(dt > 0.0)) msg << "dt must be positive (got " << dt << ")";
  else if (!std::isfinite(h)) msg << "h must be finite";
  else return;
  throw std::invalid_argument("IsingParams: " + msg.str());
}

IsingParams apply_preset(IsingParams params, PhasePreset preset) {
  switch (preset) {
    case PhasePreset::ThermalMain:
      params.W = 1e-2;
      params.h = 1e1;
      break;
    case PhasePreset::ThermalSm:
      params.W = 1e-1;
      params.h = 1e1;
      break;
    case PhasePreset::Localized:
      params.W = 1e2;
      params.h = 1e1;
      break;
  }
  return params;
}

const char* preset_name(PhasePreset preset) {
  switch (preset) {
    case PhasePreset::ThermalMain: return "thermal-main";
    case PhasePreset::ThermalSm: return "thermal-sm";
    case PhasePreset::Localized: return "localized";
  }
  return "unknown";
}

std::optional<PhasePreset> parse_preset(const std::string& name) {
  if (name == "thermal-main") return PhasePreset::ThermalMain;
  if (name == "thermal-sm") return PhasePreset::ThermalSm;
  if (name == "localized") return PhasePreset::Localized;
  return std::nullopt;
}

IsingDisorder sample_ising_disorder(const IsingParams& params, RngStream& rng) {
  params.validate();
  const int n = params.n_qubits;
  IsingDisorder d{RealMatrix::Zero(n, n), RealVector::Zero(n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) d.couplings(i, j) = rng.uniform(-0.5 * params.J_s, 0.5 * params.J_s);
  for (int i = 0; i < n; ++i) d.fields(i) = rng.uniform(-params.W, params.W);
  return d;
}

ComplexMatrix ising_hamiltonian(const IsingParams& params, const IsingDisorder& disorder) {
  params.validate();
  const int n = params.n_qubits;
  if (disorder.couplings.rows() != n || disorder.couplings.cols() != n || disorder.fields.size() != n)
    throw std::invalid_argument("ising_hamiltonian: disorder shape does not match n_qubits");
  const Index dim = Index{1} << n;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  auto bit_of = [n](int q) { return Index{1} << (n - 1 - q); };
  for (Index s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = (s & bit_of(i)) ? -1.0 : 1.0;
      diag += 0.5 * (params.h + disorder.fields(i)) * z;
    }
    h(s, s) = diag;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        const double jij = disorder.couplings(i, j);
        if (jij != 0.0) h(s ^ bit_of(i) ^ bit_of(j), s) += jij;
      }
  }
  return h;
}

IsingReservoir build_ising(const IsingParams& params, const IsingDisorder& disorder) {
  ComplexMatrix h = ising_hamiltonian(params, disorder);
  UnitaryMatrix u = evolution_unitary(h, params.dt);
  return IsingReservoir{disorder, std::move(h), std::move(u)};
}

IsingReservoir build_ising(const IsingParams& params, RngStream& rng) {
  return build_ising(params, sample_ising_disorder(params, rng));
}

// ---------------------------------------------------------------------------

ReservoirConfig::ReservoirConfig(UnitaryMatrix unitary, std::vector<int> input_qubits,
                                 InputEncoding encoding)
    : n_qubits_(qubits_for_dim(unitary.dim())),
      unitary_(std::move(unitary)),
      input_qubits_(std::move(input_qubits)),
      encoding_(encoding) {
  if (input_qubits_.empty() || static_cast<int>(input_qubits_.size()) > n_qubits_)
    throw std::invalid_argument("ReservoirConfig: need 1 <= m <= n input qubits");
  std::vector<bool> seen(static_cast<std::size_t>(n_qubits_), false);
  for (int q : input_qubits_) {
    if (q < 0 || q >= n_qubits_) throw std::invalid_argument("ReservoirConfig: input qubit out of range");
    if (seen[static_cast<std::size_t>(q)]) throw std::invalid_argument("ReservoirConfig: repeated input qubit");
    seen[static_cast<std::size_t>(q)] = true;
  }
}

ComplexVector encode_amplitude(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    std::ostringstream msg;
    msg << "encode_input: s = " << s << " outside [0, 1]";
    throw std::invalid_argument(msg.str());
  }
  ComplexVector psi(2);
  psi << std::sqrt(s), std::sqrt(1.0 - s);
  return psi;
}

DensityMatrix encode_input(double s) { return DensityMatrix::pure(encode_amplitude(s)); }

namespace {

void hermitize_from_lower(ComplexMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    m(j, j) = Complex(m(j, j).real(), 0.0);
    for (Index i = 0; i < j; ++i) m(i, j) = std::conj(m(j, i));
  }
}

void check_reservoir_state(const ReservoirConfig& config, const DensityMatrix& rho_r) {
  if (rho_r.n_qubits() != config.n_qubits()) {
    std::ostringstream msg;
    msg << "reservoir state has " << rho_r.n_qubits() << " qubits, config expects " << config.n_qubits();
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

DensityMatrix reservoir_step(const ReservoirConfig& config, const DensityMatrix& rho_r,
                             const DensityMatrix& rho_in) {
  check_reservoir_state(config, rho_r);
  if (rho_in.n_qubits() != config.input_count()) {
    std::ostringstream msg;
    msg << "input state has " << rho_in.n_qubits() << " qubits, config injects " << config.input_count();
    throw std::invalid_argument(msg.str());
  }
  const auto& inputs = config.input_qubits();
  const ComplexMatrix& u = config.unitary().matrix();

  ComplexMatrix product;
  if (config.input_count() == config.n_qubits()) {
    product = rho_in.matrix();
  } else {
    const DensityMatrix rest = partial_trace(rho_r, inputs);
    product = insert_subsystem(rho_in.matrix(), inputs, rest.matrix());
  }
  const ComplexMatrix tmp = u * product;
  ComplexMatrix out(u.rows(), u.rows());
  out.triangularView<Eigen::Lower>() = tmp * u.adjoint();
  hermitize_from_lower(out);
  return DensityMatrix::trusted(std::move(out));
}

DensityMatrix reservoir_step_pure(const ReservoirConfig& config, const DensityMatrix& rho_r,
                                  const ComplexVector& psi_in) {
  check_reservoir_state(config, rho_r);
  const Index in_dim = Index{1} << config.input_count();
  if (psi_in.size() != in_dim) throw std::invalid_argument("reservoir_step_pure: input vector has wrong length");
  const double norm = psi_in.norm();
  if (std::abs(norm - 1.0) > kStructuralTol) throw std::invalid_argument("reservoir_step_pure: input not normalized");

  const int n = config.n_qubits();
  const auto& inputs = config.input_qubits();
  const ComplexMatrix& u = config.unitary().matrix();
  const Index dim = u.rows();

  if (config.input_count() == n) {
    const ComplexVector v = u * psi_in;
    return DensityMatrix::trusted(v * v.adjoint());
  }

  const std::vector<int> others = complement_qubits(inputs, n);
  const Index rest_dim = dim / in_dim;
  const DensityMatrix sigma = partial_trace(rho_r, inputs);

  // W = U (|psi> (x) I_rest), so the new state is W sigma W^dagger.
  std::vector<Index> in_offset(static_cast<std::size_t>(in_dim));
  for (Index a = 0; a < in_dim; ++a) in_offset[static_cast<std::size_t>(a)] = scatter_bits(a, n, inputs);
  ComplexMatrix w = ComplexMatrix::Zero(dim, rest_dim);
  for (Index r = 0; r < rest_dim; ++r) {
    const Index base = scatter_bits(r, n, others);
    for (Index a = 0; a < in_dim; ++a) {
      const Complex amp = psi_in(a);
      if (amp != Complex(0.0, 0.0)) w.col(r) += amp * u.col(base | in_offset[static_cast<std::size_t>(a)]);
    }
  }
  ComplexMatrix tmp(dim, rest_dim);
  tmp.noalias() = w * sigma.matrix();
  ComplexMatrix out(dim, dim);
  out.triangularView<Eigen::Lower>() = tmp * w.adjoint();
  hermitize_from_lower(out);
  return DensityMatrix::trusted(std::move(out));
}

// ---------------------------------------------------------------------------

InputSeries InputSeries::scalars(std::vector<double> values) {
  for (double s : values)
    if (!(s >= 0.0 && s <= 1.0)) {
      std::ostringstream msg;
      msg << "InputSeries: scalar input " << s << " outside [0, 1]";
      throw std::invalid_argument(msg.str());
    }
  return InputSeries(std::move(values));
}

InputSeries InputSeries::states(std::vector<DensityMatrix> values) {
  for (const auto& rho : values) rho.validate();
  return InputSeries(std::move(values));
}

std::size_t InputSeries::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

Trajectory run_trajectory(const ReservoirConfig& config, const InputSeries& inputs,
                          const DensityMatrix& rho_0, const ObservableSet& observables, int washout,
                          const TrajectoryOptions& options, RngStream* rng) {
  const auto length = static_cast<int>(inputs.size());
  if (length == 0) throw std::invalid_argument("run_trajectory: empty input series");
  if (washout < 0 || washout >= length)
    throw std::invalid_argument("run_trajectory: washout must satisfy 0 <= washout < length");
  if (!options.shots.is_exact() && rng == nullptr)
    throw std::invalid_argument("run_trajectory: finite shots need an RngStream");
  if (inputs.is_scalar() && config.input_count() != 1)
    throw std::invalid_argument("run_trajectory: amplitude encoding injects exactly one qubit");
  check_reservoir_state(config, rho_0);
  for (const auto& o : observables.matrices())
    if (o.rows() != rho_0.dim()) throw std::invalid_argument("run_trajectory: observable dimension mismatch");

  Trajectory out{{}, RealMatrix(length - washout, static_cast<Index>(observables.size())), {}, rho_0};
  out.steps.reserve(static_cast<std::size_t>(length - washout));
  DensityMatrix rho = rho_0;
  for (int k = 0; k < length; ++k) {
    if (inputs.is_scalar()) {
      rho = reservoir_step_pure(config, rho, encode_amplitude(inputs.scalar_values()[static_cast<std::size_t>(k)]));
    } else {
      rho = reservoir_step(config, rho, inputs.state_values()[static_cast<std::size_t>(k)]);
    }
    if (k >= washout) {
      const Index row = k - washout;
      out.steps.push_back(k + 1);
      out.expectations.row(row) = options.shots.is_exact()
                                      ? exact_expectations(rho, observables).transpose()
                                      : estimate_expectations(rho, observables, options.shots, *rng).transpose();
      if (options.record_states) out.states.push_back(rho);
    }
  }
  out.final_state = std::move(rho);
  return out;
}

DensityMatrix random_initial_state(int n_qubits, RngStream& rng) {
  if (n_qubits < 1) throw std::invalid_argument("random_initial_state: n must be >= 1");
  return DensityMatrix::pure(haar_state(Index{1} << n_qubits, rng));
}

}  // namespace qrc
