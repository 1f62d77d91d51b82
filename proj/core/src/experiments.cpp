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

#include "qrclab/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

namespace qrc {

// ---------------------------------------------------------------------------
// Utilities

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: x values are all equal");
  return sxy / sxx;
}

double sample_variance(const Eigen::Ref<const RealVector>& values) {
  const Index n = values.size();
  if (n < 2) return 0.0;
  const double m = values.mean();
  return (values.array() - m).square().sum() / static_cast<double>(n - 1);
}

const char* scrambler_name(ScramblerKind kind) {
  switch (kind) {
    case ScramblerKind::Ising: return "ising";
    case ScramblerKind::Identity: return "identity";
    case ScramblerKind::Haar: return "haar";
    case ScramblerKind::BlockHaar: return "block-haar";
  }
  return "unknown";
}

UnitaryMatrix sample_scrambler(ScramblerKind kind, int n_qubits, const IsingParams& ising, RngStream& rng) {
  switch (kind) {
    case ScramblerKind::Ising: {
      IsingParams p = ising;
      p.n_qubits = n_qubits;
      return build_ising(p, rng).unitary;
    }
    case ScramblerKind::Identity:
      return UnitaryMatrix::identity(Index{1} << n_qubits);
    case ScramblerKind::Haar:
      return haar_unitary(Index{1} << n_qubits, rng);
    case ScramblerKind::BlockHaar:
      return block_haar_unitary(magnetization_sectors(n_qubits), rng);
  }
  throw std::invalid_argument("sample_scrambler: unknown kind");
}

namespace {

ComplexVector basis_input(int bit) {
  ComplexVector psi = ComplexVector::Zero(2);
  psi(bit) = 1.0;
  return psi;
}

void check_bit(int input_bit) {
  if (input_bit != 0 && input_bit != 1) throw std::invalid_argument("input_bit must be 0 or 1");
}

}  // namespace

// ---------------------------------------------------------------------------
// Population recurrence

AlphaVector alpha_recurrence_step(const AlphaVector& alphas, int input_bit) {
  check_bit(input_bit);
  if (input_bit == 0) return alpha_recurrence_step(alphas.reversed(), 1).reversed();

  const int n = alphas.size() - 1;
  if (n < 1) throw std::invalid_argument("alpha_recurrence_step: need n >= 1");
  const double nn = n;
  RealVector next = RealVector::Zero(n + 1);
  // Sector l keeps its weight when the overwritten qubit was already 1
  // (probability l/n) and receives sector l-1 otherwise.
  for (int l = 1; l < n; ++l) next(l) = (l / nn) * alphas[l] + (1.0 - (l - 1) / nn) * alphas[l - 1];
  next(n) = alphas[n] + alphas[n - 1] / nn;
  return AlphaVector::checked(std::move(next));
}

std::vector<AlphaVector> alpha_trajectory(const AlphaVector& initial, int steps, int input_bit) {
  if (steps < 0) throw std::invalid_argument("alpha_trajectory: steps must be >= 0");
  std::vector<AlphaVector> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(initial);
  for (int k = 0; k < steps; ++k) out.push_back(alpha_recurrence_step(out.back(), input_bit));
  return out;
}

int alpha_convergence_time(int n_qubits, double epsilon) {
  if (n_qubits < 1) throw std::invalid_argument("alpha_convergence_time: n must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("alpha_convergence_time: need 0 < epsilon < 1");
  AlphaVector a = AlphaVector::uniform(n_qubits + 1);
  constexpr int kMaxSteps = 100'000'000;
  for (int k = 0; k <= kMaxSteps; ++k) {
    if (1.0 - a[n_qubits] < epsilon) return k;
    a = alpha_recurrence_step(a, 1);
  }
  throw NumericalError("alpha_convergence_time: no convergence within step limit");
}

PopulationEnsemble simulate_sector_populations(int n_qubits, int steps, int draws, int input_bit,
                                               const RngStream& rng, int threads) {
  check_bit(input_bit);
  if (steps < 0 || draws < 2) throw std::invalid_argument("simulate_sector_populations: need steps >= 0, draws >= 2");
  const SectorDecomposition dec = magnetization_sectors(n_qubits);
  const int sectors = dec.sector_count();
  const ComplexVector psi = basis_input(input_bit);

  std::vector<RealMatrix> per_draw(static_cast<std::size_t>(draws));
  parallel_for(draws, threads, [&](int d) {
    RngStream r = rng.child(static_cast<std::uint64_t>(n_qubits), static_cast<std::uint64_t>(d));
    RngStream state_rng = r.child(0);
    RngStream u_rng = r.child(1);
    RealMatrix pops(steps + 1, sectors);
    DensityMatrix rho = random_initial_state(n_qubits, state_rng);
    pops.row(0) = sector_populations(rho, dec).values().transpose();
    for (int k = 1; k <= steps; ++k) {
      const ReservoirConfig cfg(block_haar_unitary(dec, u_rng));
      rho = reservoir_step_pure(cfg, rho, psi);
      pops.row(k) = sector_populations(rho, dec).values().transpose();
    }
    per_draw[static_cast<std::size_t>(d)] = std::move(pops);
  });

  PopulationEnsemble out{RealMatrix::Zero(steps + 1, sectors), RealMatrix::Zero(steps + 1, sectors), draws};
  for (const auto& p : per_draw) out.mean += p;
  out.mean /= draws;
  RealMatrix sq = RealMatrix::Zero(steps + 1, sectors);
  for (const auto& p : per_draw) sq.array() += (p - out.mean).array().square();
  out.std_error = (sq.array() / (static_cast<double>(draws - 1) * draws)).sqrt().matrix();
  return out;
}

// ---------------------------------------------------------------------------
// Concentration

double ConcentrationResult::mean_variance(int n, const std::string& observable) const {
  for (const auto& r : rows)
    if (r.n == n && r.observable == observable) return r.mean_variance;
  std::ostringstream msg;
  msg << "no concentration row for n=" << n << " observable=" << observable;
  throw std::invalid_argument(msg.str());
}

ConcentrationResult run_concentration(const ConcentrationConfig& config, const RngStream& rng) {
  if (config.ns.empty()) throw std::invalid_argument("run_concentration: empty ns");
  if (config.realizations < 1) throw std::invalid_argument("run_concentration: realizations must be >= 1");
  if (config.measure_steps < 2) throw std::invalid_argument("run_concentration: measure_steps must be >= 2");
  if (config.washout < 0) throw std::invalid_argument("run_concentration: washout must be >= 0");
  for (int n : config.ns) {
    if (n < 2) throw std::invalid_argument("run_concentration: n must be >= 2");
    if (config.probe_qubit < 1 || config.probe_qubit >= n)
      throw std::invalid_argument("run_concentration: probe qubit must be a non-input qubit for every n");
  }

  struct Task {
    int n;
    int realization;
  };
  std::vector<Task> tasks;
  for (int n : config.ns)
    for (int r = 0; r < config.realizations; ++r) tasks.push_back({n, r});

  std::vector<std::vector<std::string>> labels(tasks.size());
  std::vector<RealVector> variances(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), config.threads, [&](int t) {
    const Task task = tasks[static_cast<std::size_t>(t)];
    const int n = task.n;
    RngStream r = rng.child(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(task.realization));
    RngStream u_rng = r.child(0), state_rng = r.child(1), input_rng = r.child(2), shot_rng = r.child(3);

    const ReservoirConfig cfg(sample_scrambler(config.scrambler, n, config.ising, u_rng));
    const ObservableSet obs = single_qubit_paulis(n, {0, config.probe_qubit});
    const DensityMatrix rho0 = random_initial_state(n, state_rng);
    std::vector<double> s(static_cast<std::size_t>(config.washout + config.measure_steps));
    for (double& v : s) v = input_rng.uniform();

    TrajectoryOptions opts;
    opts.shots = config.shots;
    const Trajectory traj = run_trajectory(cfg, InputSeries::scalars(std::move(s)), rho0, obs,
                                           config.washout, opts, &shot_rng);
    RealVector v(static_cast<Index>(obs.size()));
    for (Index c = 0; c < v.size(); ++c) v(c) = sample_variance(traj.expectations.col(c));
    variances[static_cast<std::size_t>(t)] = std::move(v);
    labels[static_cast<std::size_t>(t)] = obs.labels();
  });

  ConcentrationResult out;
  std::size_t t = 0;
  for (int n : config.ns) {
    const std::vector<std::string>& lab = labels[t];
    RealVector sum = RealVector::Zero(static_cast<Index>(lab.size()));
    for (int r = 0; r < config.realizations; ++r, ++t) {
      sum += variances[t];
      for (std::size_t c = 0; c < lab.size(); ++c)
        out.samples.push_back({n, r, lab[c], variances[t](static_cast<Index>(c))});
    }
    for (std::size_t c = 0; c < lab.size(); ++c)
      out.rows.push_back({n, lab[c], sum(static_cast<Index>(c)) / config.realizations, config.realizations});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Echo state

PhaseSetting phase_setting(PhasePreset preset) {
  const IsingParams p = apply_preset(IsingParams{}, preset);
  return {preset_name(preset), p.W, p.h};
}

long long count_converged_entries(const ComplexMatrix& a, const ComplexMatrix& b, double threshold) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("count_converged_entries: dimension mismatch");
  long long count = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) {
      const Complex d = a(i, j) - b(i, j);
      count += std::abs(d.real()) < threshold;
      count += std::abs(d.imag()) < threshold;
    }
  return count;
}

double EchoStateResult::final_mean_distance(int n, const std::string& phase) const {
  const EchoCurveRow* last = nullptr;
  for (const auto& r : curves)
    if (r.n == n && r.phase == phase && (!last || r.step > last->step)) last = &r;
  if (!last) throw std::invalid_argument("no echo-state curve for n=" + std::to_string(n) + " phase=" + phase);
  return last->mean_trace_distance;
}

double EchoStateResult::mean_converged(int n, const std::string& phase) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : counts)
    if (r.n == n && r.phase == phase) {
      sum += static_cast<double>(r.converged);
      ++count;
    }
  if (count == 0) throw std::invalid_argument("no N_c rows for n=" + std::to_string(n) + " phase=" + phase);
  return sum / count;
}

EchoStateResult run_echo_state(const EchoStateConfig& config, const RngStream& rng) {
  if (!(config.threshold > 0.0)) throw std::invalid_argument("run_echo_state: threshold must be positive");
  if (config.inputs_count < 1) throw std::invalid_argument("run_echo_state: inputs_count must be >= 1");
  if (config.realizations < 1) throw std::invalid_argument("run_echo_state: realizations must be >= 1");
  if (config.record_every < 1) throw std::invalid_argument("run_echo_state: record_every must be >= 1");
  if (config.ns.empty() || config.phases.empty()) throw std::invalid_argument("run_echo_state: empty ns or phases");

  std::vector<int> recorded;
  for (int k = 1; k <= config.inputs_count; ++k)
    if (k % config.record_every == 0 || k == config.inputs_count) recorded.push_back(k);

  struct Task {
    std::size_t phase;
    int n;
    int realization;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < config.phases.size(); ++p)
    for (int n : config.ns)
      for (int r = 0; r < config.realizations; ++r) tasks.push_back({p, n, r});

  std::vector<std::vector<double>> distances(tasks.size());
  std::vector<long long> converged(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), config.threads, [&](int t) {
    const Task task = tasks[static_cast<std::size_t>(t)];
    const PhaseSetting& phase = config.phases[task.phase];
    // Same streams across phases: only (W, h) differ between paired runs.
    RngStream r = rng.child(static_cast<std::uint64_t>(task.n), static_cast<std::uint64_t>(task.realization));
    RngStream u_rng = r.child(0), state_rng = r.child(1), input_rng = r.child(2);

    IsingParams p = config.ising;
    p.n_qubits = task.n;
    p.W = phase.W;
    p.h = phase.h;
    const ReservoirConfig cfg(build_ising(p, u_rng).unitary);
    DensityMatrix a = random_initial_state(task.n, state_rng);
    DensityMatrix b = random_initial_state(task.n, state_rng);

    std::vector<double> d;
    d.reserve(recorded.size());
    std::size_t next = 0;
    for (int k = 1; k <= config.inputs_count; ++k) {
      const ComplexVector psi = encode_amplitude(input_rng.uniform());
      a = reservoir_step_pure(cfg, a, psi);
      b = reservoir_step_pure(cfg, b, psi);
      if (next < recorded.size() && recorded[next] == k) {
        d.push_back(trace_distance(a, b));
        ++next;
      }
    }
    distances[static_cast<std::size_t>(t)] = std::move(d);
    converged[static_cast<std::size_t>(t)] = count_converged_entries(a.matrix(), b.matrix(), config.threshold);
  });

  EchoStateResult out;
  std::size_t t = 0;
  for (const auto& phase : config.phases)
    for (int n : config.ns) {
      std::vector<double> sum(recorded.size(), 0.0);
      for (int r = 0; r < config.realizations; ++r, ++t) {
        for (std::size_t i = 0; i < recorded.size(); ++i) sum[i] += distances[t][i];
        out.counts.push_back({n, phase.label, r, converged[t]});
      }
      for (std::size_t i = 0; i < recorded.size(); ++i)
        out.curves.push_back({n, phase.label, phase.W, phase.h, recorded[i], sum[i] / config.realizations});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Discrimination

double DiscriminationResult::class_mean(int n, const std::string& scrambler, int input_class) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : rows)
    if (r.n == n && r.scrambler == scrambler && r.input_class == input_class) {
      sum += r.expectation;
      ++count;
    }
  if (count == 0) throw std::invalid_argument("no discrimination rows for n=" + std::to_string(n) + " " + scrambler);
  return sum / count;
}

double DiscriminationResult::mean_paired_gap(int n, const std::string& scrambler) const {
  std::map<int, std::pair<double, double>> by_realization;
  for (const auto& r : rows)
    if (r.n == n && r.scrambler == scrambler)
      (r.input_class == 0 ? by_realization[r.realization].first : by_realization[r.realization].second) =
          r.expectation;
  if (by_realization.empty())
    throw std::invalid_argument("no discrimination rows for n=" + std::to_string(n) + " " + scrambler);
  double sum = 0.0;
  for (const auto& [_, v] : by_realization) sum += std::abs(v.first - v.second);
  return sum / static_cast<double>(by_realization.size());
}

double DiscriminationResult::fraction_polarized(int n, const std::string& scrambler, int input_class,
                                                double tol) const {
  const double target = input_class == 0 ? 1.0 : -1.0;
  int hit = 0, count = 0;
  for (const auto& r : rows)
    if (r.n == n && r.scrambler == scrambler && r.input_class == input_class) {
      hit += std::abs(r.expectation - target) < tol;
      ++count;
    }
  if (count == 0) throw std::invalid_argument("no discrimination rows for n=" + std::to_string(n) + " " + scrambler);
  return static_cast<double>(hit) / count;
}

DiscriminationResult run_discrimination(const DiscriminationConfig& config, const RngStream& rng) {
  if (config.series_length < 1) throw std::invalid_argument("run_discrimination: series_length must be >= 1");
  if (config.realizations < 1) throw std::invalid_argument("run_discrimination: realizations must be >= 1");
  for (int n : config.ns)
    if (n < 2) throw std::invalid_argument("run_discrimination: n must be >= 2");

  struct Kind {
    const char* label;
    ScramblerKind kind;
    std::uint64_t key;
  };
  std::vector<Kind> kinds;
  if (config.include_symmetric) kinds.push_back({"symmetric", config.symmetric_scrambler, 0});
  if (config.include_haar) kinds.push_back({"haar", ScramblerKind::Haar, 1});

  struct Task {
    int n;
    std::size_t kind;
    int realization;
  };
  std::vector<Task> tasks;
  for (int n : config.ns)
    for (std::size_t k = 0; k < kinds.size(); ++k)
      for (int r = 0; r < config.realizations; ++r) tasks.push_back({n, k, r});

  std::vector<std::array<DiscriminationRow, 2>> results(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), config.threads, [&](int t) {
    const Task task = tasks[static_cast<std::size_t>(t)];
    const Kind& kind = kinds[task.kind];
    const int n = task.n;
    RngStream r = rng.child(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(task.realization))
                      .child(kind.key);
    RngStream u_rng = r.child(0), qubit_rng = r.child(1);
    const ReservoirConfig cfg(sample_scrambler(kind.kind, n, config.ising, u_rng));
    const int qubit = 1 + static_cast<int>(qubit_rng.uniform_index(static_cast<std::uint64_t>(n - 1)));
    const ComplexMatrix z = single_qubit_operator(n, qubit, pauli::Z());

    for (int c = 0; c < 2; ++c) {
      RngStream state_rng = r.child(2 + static_cast<std::uint64_t>(c));
      DensityMatrix rho = random_initial_state(n, state_rng);
      const ComplexVector psi = basis_input(c);
      for (int k = 0; k < config.series_length; ++k) rho = reservoir_step_pure(cfg, rho, psi);
      results[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)] =
          DiscriminationRow{n, kind.label, c, task.realization, qubit, exact_expectation(rho, z)};
    }
  });

  DiscriminationResult out;
  for (const auto& pair : results)
    for (const auto& row : pair) out.rows.push_back(row);
  return out;
}

// ---------------------------------------------------------------------------
// Twirl-average and variance checks

namespace {

std::vector<double> running_mean_distances(const DensityMatrix& rho, const std::vector<long long>& checkpoints,
                                           RngStream& u_rng) {
  const SectorDecomposition dec = magnetization_sectors(rho.n_qubits());
  const DensityMatrix predicted = lemma1_mean_state(sector_populations(rho, dec), dec);
  std::vector<double> out;
  ComplexMatrix sum = ComplexMatrix::Zero(rho.dim(), rho.dim());
  long long drawn = 0;
  for (long long target : checkpoints) {
    for (; drawn < target; ++drawn) {
      const UnitaryMatrix u = block_haar_unitary(dec, u_rng);
      sum += u.matrix() * rho.matrix() * u.adjoint();
    }
    out.push_back(trace_distance(ComplexMatrix(sum / static_cast<double>(drawn)), predicted.matrix()));
  }
  return out;
}

void check_checkpoints(const std::vector<long long>& checkpoints) {
  if (checkpoints.empty()) throw std::invalid_argument("verify_lemma1: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw std::invalid_argument("verify_lemma1: checkpoints must be positive and increasing");
}

}  // namespace

std::vector<Lemma1Row> verify_lemma1(const DensityMatrix& rho, const std::vector<long long>& checkpoints,
                                     const RngStream& rng) {
  check_checkpoints(checkpoints);
  RngStream u_rng = rng.child(1);
  const std::vector<double> d = running_mean_distances(rho, checkpoints, u_rng);
  std::vector<Lemma1Row> out;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) out.push_back({checkpoints[i], d[i], 0.0});
  return out;
}

std::vector<Lemma1Row> verify_lemma1(const Lemma1Config& config, const RngStream& rng) {
  if (config.n_qubits < 1 || config.n_qubits > 6) throw std::invalid_argument("verify_lemma1: n must be in [1, 6]");
  if (config.repeats < 1) throw std::invalid_argument("verify_lemma1: repeats must be >= 1");
  check_checkpoints(config.checkpoints);

  std::vector<std::vector<double>> runs(static_cast<std::size_t>(config.repeats));
  parallel_for(config.repeats, config.threads, [&](int rep) {
    RngStream r = rng.child(static_cast<std::uint64_t>(config.n_qubits), static_cast<std::uint64_t>(rep));
    RngStream state_rng = r.child(0), u_rng = r.child(1);
    const DensityMatrix rho = random_initial_state(config.n_qubits, state_rng);
    runs[static_cast<std::size_t>(rep)] = running_mean_distances(rho, config.checkpoints, u_rng);
  });

  std::vector<Lemma1Row> out;
  for (std::size_t i = 0; i < config.checkpoints.size(); ++i) {
    RealVector v(config.repeats);
    for (int rep = 0; rep < config.repeats; ++rep) v(rep) = runs[static_cast<std::size_t>(rep)][i];
    const double se = config.repeats > 1 ? std::sqrt(sample_variance(v) / config.repeats) : 0.0;
    out.push_back({config.checkpoints[i], v.mean(), se});
  }
  return out;
}

DensityMatrix injected_mixed_state(int n_qubits) {
  if (n_qubits < 2) throw std::invalid_argument("injected_mixed_state: n must be >= 2");
  const Index rest = Index{1} << (n_qubits - 1);
  ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  return DensityMatrix::trusted(kron(zero, ComplexMatrix::Identity(rest, rest) / static_cast<double>(rest)));
}

namespace {

bool is_diagonal(const ComplexMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
  return true;
}

}  // namespace

std::vector<VarianceRow> verify_variance_scaling(const VarianceScalingConfig& config, const RngStream& rng) {
  if (config.samples < 2) throw std::invalid_argument("verify_variance_scaling: samples must be >= 2");
  for (int n : config.ns)
    if (n < 2 || n > 8) throw std::invalid_argument("verify_variance_scaling: n must be in [2, 8]");

  const bool haar = config.ensemble == UnitaryEnsemble::Haar;
  std::vector<VarianceRow> out;
  for (int n : config.ns) {
    const Index dim = Index{1} << n;
    const ComplexMatrix o = config.observable ? config.observable(n) : single_qubit_operator(n, 1, pauli::Z());
    const DensityMatrix rho = config.state ? config.state(n) : injected_mixed_state(n);
    if (o.rows() != dim || rho.dim() != dim) throw std::invalid_argument("verify_variance_scaling: dimension mismatch");
    const bool diagonal_o = is_diagonal(o);
    const RealVector o_diag = o.diagonal().real();

    // Haar: U rho U^dagger = sum_j p_j |u v_j><u v_j|, and U V is a Haar isometry.
    const HermitianEigen eig = herm_eig(rho.matrix());
    std::vector<double> weights;
    for (Index j = 0; j < dim; ++j)
      if (eig.eigenvalues(j) > 1e-14) weights.push_back(eig.eigenvalues(j));
    const auto rank = static_cast<Index>(weights.size());
    const SectorDecomposition dec = magnetization_sectors(n);

    RealVector values(config.samples);
    parallel_for(config.samples, config.threads, [&](int s) {
      RngStream r = rng.child(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s));
      double value = 0.0;
      if (haar) {
        const ComplexMatrix w = haar_isometry(dim, rank, r);
        for (Index j = 0; j < rank; ++j) {
          const double q = diagonal_o ? o_diag.dot(w.col(j).cwiseAbs2())
                                      : (w.col(j).adjoint() * o * w.col(j))(0, 0).real();
          value += weights[static_cast<std::size_t>(j)] * q;
        }
      } else {
        const UnitaryMatrix u = block_haar_unitary(dec, r);
        value = exact_expectation(conjugate(u, rho), o);
      }
      values(s) = value;
    });
    out.push_back({n, haar ? "haar" : "block-haar", config.observable_label, values.mean(), sample_variance(values)});
  }
  return out;
}

}  // namespace qrc
