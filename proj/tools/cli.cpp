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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrclab/experiments.hpp"
#include "qrclab/version.hpp"

namespace qrc::cli {

namespace {

struct KeySpec {
  const char* key;
  const char* help;
};

// Keys accepted both as --flags and in --config files.
constexpr KeySpec kKeys[] = {
    {"experiment", "experiment name (config files only; use the subcommand on the command line)"},
    {"ns", "comma-separated qubit counts (default: concentration 3..7, echo-state 7, discriminate 4,6,8, lemma1 3, variance-scaling 2..7, alpha 4)"},
    {"realizations", "ensemble size per n (default: 100, echo-state 20)"},
    {"washout", "inputs discarded before measuring (default: 200)"},
    {"measure-steps", "inputs recorded after the washout (default: 200)"},
    {"W", "on-site disorder width in J_s units (default: 0.01)"},
    {"h", "uniform field in J_s units (default: 10)"},
    {"dt", "time between inputs in 1/J_s units (default: 10)"},
    {"J-s", "coupling scale (default: 1)"},
    {"shots", "'exact' or shots per expectation estimate (default: exact)"},
    {"seed", "64-bit seed (falls back to QRCLAB_SEED, then 0)"},
    {"output", "results file path (default: <experiment>.csv or .json)"},
    {"format", "csv or json (default: csv)"},
    {"phase-preset", "thermal-main, thermal-sm or localized; overrides W and h (default: none)"},
    {"threads", "worker threads (default: 1)"},
    {"scrambler", "concentration scrambler: ising, identity, haar, block-haar (default: ising)"},
    {"probe-qubit", "non-input qubit recorded by concentration (default: 1)"},
    {"inputs-count", "echo-state inputs per trajectory (default: 500)"},
    {"threshold", "echo-state convergence threshold for N_c (default: 1e-10)"},
    {"record-every", "echo-state trace-distance sampling interval (default: 10)"},
    {"phases", "echo-state phase presets, comma-separated (default: thermal-main,localized)"},
    {"series-length", "discrimination input series length (default: 1000)"},
    {"symmetric-scrambler", "discrimination symmetric scrambler: block-haar or ising (default: block-haar)"},
    {"samples", "variance-scaling unitary draws per n (default: 10000)"},
    {"ensemble", "variance-scaling ensemble: haar or block-haar (default: haar)"},
    {"checkpoints", "lemma1 sample-count checkpoints, comma-separated (default: 100,1000,10000)"},
    {"repeats", "lemma1 independent runs per checkpoint (default: 10)"},
    {"steps", "alpha recurrence steps (default 3 n^2)"},
    {"input-bit", "alpha injected basis state, 0 or 1 (default: 1)"},
};

bool known_key(const std::string& key) {
  return std::any_of(std::begin(kKeys), std::end(kKeys), [&](const KeySpec& k) { return key == k.key; });
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  throw UsageError("invalid value '" + value + "' for '" + key + "': " + why);
}

long long parse_integer(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    bad_value(key, value, "expected an integer");
  }
  if (pos != v.size()) bad_value(key, value, "expected an integer");
  return out;
}

int parse_int(const std::string& key, const std::string& value, long long lo, long long hi) {
  const long long v = parse_integer(key, value);
  if (v < lo || v > hi) {
    std::ostringstream why;
    why << "must be in [" << lo << ", " << hi << "]";
    bad_value(key, value, why.str());
  }
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty() || v[0] == '-') bad_value(key, value, "expected a nonnegative integer");
  std::size_t pos = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    bad_value(key, value, "expected a nonnegative integer");
  }
  if (pos != v.size()) bad_value(key, value, "expected a nonnegative integer");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    bad_value(key, value, "expected a number");
  }
  if (pos != v.size() || !std::isfinite(out)) bad_value(key, value, "expected a finite number");
  return out;
}

double parse_positive(const std::string& key, const std::string& value) {
  const double v = parse_real(key, value);
  if (!(v > 0.0)) bad_value(key, value, "must be positive");
  return v;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "," : "") << items[i];
  return out.str();
}

struct ExperimentDefaults {
  std::vector<int> ns;
  int realizations;
  int max_n;
};

ExperimentDefaults defaults_for(Experiment e) {
  switch (e) {
    case Experiment::Concentration: return {{3, 4, 5, 6, 7}, 100, 10};
    case Experiment::EchoState: return {{7}, 20, 10};
    case Experiment::Discriminate: return {{4, 6, 8}, 100, 10};
    case Experiment::Lemma1: return {{3}, 10, 6};
    case Experiment::VarianceScaling: return {{2, 3, 4, 5, 6, 7}, 1, 8};
    case Experiment::Alpha: return {{4}, 1, 14};
  }
  return {{}, 1, 1};
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
  constexpr long long kBig = 1'000'000'000;
  if (key == "experiment") {
    // Resolved before apply_key.
  } else if (key == "ns") {
    c.ns.clear();
    for (const auto& item : split_list(value)) c.ns.push_back(parse_int(key, item, 1, 14));
    if (c.ns.empty()) bad_value(key, value, "expected at least one qubit count");
  } else if (key == "realizations") {
    c.realizations = parse_int(key, value, 1, kBig);
  } else if (key == "washout") {
    c.washout = parse_int(key, value, 0, kBig);
  } else if (key == "measure-steps") {
    c.measure_steps = parse_int(key, value, 2, kBig);
  } else if (key == "W") {
    c.W = parse_real(key, value);
    if (c.W < 0.0) bad_value(key, value, "must be nonnegative");
  } else if (key == "h") {
    c.h = parse_real(key, value);
  } else if (key == "dt") {
    c.dt = parse_positive(key, value);
  } else if (key == "J-s") {
    c.J_s = parse_positive(key, value);
  } else if (key == "shots") {
    c.shots = trim(value) == "exact" ? ShotConfig::exact() : ShotConfig::shots(parse_int(key, value, 1, kBig));
  } else if (key == "seed") {
    c.seed = parse_u64(key, value);
  } else if (key == "output") {
    if (trim(value).empty()) bad_value(key, value, "empty path");
    c.output_path = trim(value);
  } else if (key == "format") {
    const std::string v = trim(value);
    if (v == "csv") c.format = OutputFormat::Csv;
    else if (v == "json") c.format = OutputFormat::Json;
    else bad_value(key, value, "expected csv or json");
  } else if (key == "phase-preset") {
    const auto p = parse_preset(trim(value));
    if (!p) bad_value(key, value, "expected thermal-main, thermal-sm or localized");
    c.phase_preset = p;
  } else if (key == "threads") {
    c.threads = parse_int(key, value, 1, 1024);
  } else if (key == "scrambler") {
    const std::string v = trim(value);
    if (v != "ising" && v != "identity" && v != "haar" && v != "block-haar")
      bad_value(key, value, "expected ising, identity, haar or block-haar");
    c.scrambler = v;
  } else if (key == "probe-qubit") {
    c.probe_qubit = parse_int(key, value, 1, 13);
  } else if (key == "inputs-count") {
    c.inputs_count = parse_int(key, value, 1, kBig);
  } else if (key == "threshold") {
    c.threshold = parse_positive(key, value);
  } else if (key == "record-every") {
    c.record_every = parse_int(key, value, 1, kBig);
  } else if (key == "phases") {
    c.phases = split_list(value);
    if (c.phases.empty()) bad_value(key, value, "expected at least one phase");
    for (const auto& p : c.phases)
      if (!parse_preset(p)) bad_value(key, value, "unknown phase '" + p + "'");
  } else if (key == "series-length") {
    c.series_length = parse_int(key, value, 1, kBig);
  } else if (key == "symmetric-scrambler") {
    const std::string v = trim(value);
    if (v != "ising" && v != "block-haar") bad_value(key, value, "expected block-haar or ising");
    c.symmetric_scrambler = v;
  } else if (key == "samples") {
    c.samples = parse_int(key, value, 2, kBig);
  } else if (key == "ensemble") {
    const std::string v = trim(value);
    if (v != "haar" && v != "block-haar") bad_value(key, value, "expected haar or block-haar");
    c.ensemble = v;
  } else if (key == "checkpoints") {
    c.checkpoints.clear();
    for (const auto& item : split_list(value)) c.checkpoints.push_back(parse_int(key, item, 1, kBig));
    if (c.checkpoints.empty()) bad_value(key, value, "expected at least one checkpoint");
    for (std::size_t i = 1; i < c.checkpoints.size(); ++i)
      if (c.checkpoints[i] <= c.checkpoints[i - 1]) bad_value(key, value, "checkpoints must increase");
  } else if (key == "repeats") {
    c.repeats = parse_int(key, value, 1, kBig);
  } else if (key == "steps") {
    c.steps = parse_int(key, value, 0, kBig);
  } else if (key == "input-bit") {
    c.input_bit = parse_int(key, value, 0, 1);
  } else {
    throw UsageError("unknown key '" + key + "'");
  }
}

void validate_against_experiment(const RunConfig& c) {
  const ExperimentDefaults d = defaults_for(c.experiment);
  const int min_n = c.experiment == Experiment::Alpha ? 1 : 2;
  for (int n : c.ns)
    if (n < min_n || n > d.max_n) {
      std::ostringstream msg;
      msg << "invalid value '" << join(c.ns) << "' for 'ns': " << experiment_name(c.experiment)
          << " needs " << min_n << " <= n <= " << d.max_n;
      throw UsageError(msg.str());
    }
  if (c.experiment == Experiment::Concentration) {
    for (int n : c.ns)
      if (c.probe_qubit >= n) throw UsageError("invalid value for 'probe-qubit': must be < every n");
  }
  if (c.experiment == Experiment::Alpha && c.ns.size() != 1)
    throw UsageError("invalid value '" + join(c.ns) + "' for 'ns': alpha takes a single n");
}

// ---------------------------------------------------------------------------
// Result tables

const std::vector<std::string> kLongHeader{"experiment", "n",          "setting",  "realization",
                                           "step",       "observable", "quantity", "value"};

std::vector<Cell> long_row(const std::string& experiment, int n, const std::string& setting, Cell realization,
                           Cell step, const std::string& observable, const std::string& quantity, Cell value) {
  return {experiment,
          static_cast<long long>(n),
          setting.empty() ? Cell{} : Cell{setting},
          std::move(realization),
          std::move(step),
          observable.empty() ? Cell{} : Cell{observable},
          quantity,
          std::move(value)};
}

IsingParams ising_from(const RunConfig& c) {
  IsingParams p;
  p.J_s = c.J_s;
  p.h = c.h;
  p.W = c.W;
  p.dt = c.dt;
  return p;
}

ScramblerKind scrambler_from(const std::string& s) {
  if (s == "ising") return ScramblerKind::Ising;
  if (s == "identity") return ScramblerKind::Identity;
  if (s == "haar") return ScramblerKind::Haar;
  return ScramblerKind::BlockHaar;
}

Table concentration_table(const RunConfig& c, const RngStream& rng) {
  ConcentrationConfig cfg;
  cfg.ns = c.ns;
  cfg.realizations = c.realizations;
  cfg.washout = c.washout;
  cfg.measure_steps = c.measure_steps;
  cfg.ising = ising_from(c);
  cfg.scrambler = scrambler_from(c.scrambler);
  cfg.probe_qubit = c.probe_qubit;
  cfg.shots = c.shots;
  cfg.threads = c.threads;
  const ConcentrationResult res = run_concentration(cfg, rng);

  Table t{kLongHeader, {}};
  for (const auto& s : res.samples)
    t.rows.push_back(long_row("concentration", s.n, c.scrambler, static_cast<long long>(s.realization), {},
                              s.observable, "variance", s.variance));
  for (const auto& r : res.rows) {
    t.rows.push_back(long_row("concentration", r.n, c.scrambler, {}, {}, r.observable, "mean_variance",
                              r.mean_variance));
    t.rows.push_back(long_row("concentration", r.n, c.scrambler, {}, {}, r.observable, "realization_count",
                              static_cast<long long>(r.realization_count)));
  }
  return t;
}

Table echo_table(const RunConfig& c, const RngStream& rng) {
  EchoStateConfig cfg;
  cfg.ns = c.ns;
  cfg.realizations = c.realizations;
  cfg.inputs_count = c.inputs_count;
  cfg.threshold = c.threshold;
  cfg.record_every = c.record_every;
  cfg.ising = ising_from(c);
  cfg.threads = c.threads;
  cfg.phases.clear();
  if (c.phase_preset) {
    cfg.phases.push_back(phase_setting(*c.phase_preset));
  } else {
    for (const auto& p : c.phases) cfg.phases.push_back(phase_setting(*parse_preset(p)));
  }
  const EchoStateResult res = run_echo_state(cfg, rng);

  Table t{kLongHeader, {}};
  for (const auto& r : res.curves)
    t.rows.push_back(long_row("echo-state", r.n, r.phase, {}, static_cast<long long>(r.step), "",
                              "mean_trace_distance", r.mean_trace_distance));
  for (const auto& r : res.counts)
    t.rows.push_back(long_row("echo-state", r.n, r.phase, static_cast<long long>(r.realization),
                              static_cast<long long>(c.inputs_count), "", "N_c", static_cast<long long>(r.converged)));
  for (const auto& phase : cfg.phases)
    for (int n : cfg.ns)
      t.rows.push_back(long_row("echo-state", n, phase.label, {}, static_cast<long long>(c.inputs_count), "",
                                "mean_N_c", res.mean_converged(n, phase.label)));
  return t;
}

Table discrimination_table(const RunConfig& c, const RngStream& rng) {
  DiscriminationConfig cfg;
  cfg.ns = c.ns;
  cfg.realizations = c.realizations;
  cfg.series_length = c.series_length;
  cfg.symmetric_scrambler = scrambler_from(c.symmetric_scrambler);
  cfg.ising = ising_from(c);
  cfg.threads = c.threads;
  const DiscriminationResult res = run_discrimination(cfg, rng);

  Table t{kLongHeader, {}};
  for (const auto& r : res.rows)
    t.rows.push_back(long_row("discriminate", r.n, r.scrambler + (r.input_class == 0 ? "/zero" : "/one"),
                              static_cast<long long>(r.realization), static_cast<long long>(c.series_length),
                              "z" + std::to_string(r.qubit), "expectation", r.expectation));
  return t;
}

Table lemma1_table(const RunConfig& c, const RngStream& rng) {
  Table t{kLongHeader, {}};
  for (int n : c.ns) {
    Lemma1Config cfg;
    cfg.n_qubits = n;
    cfg.checkpoints = c.checkpoints;
    cfg.repeats = c.repeats;
    cfg.threads = c.threads;
    for (const auto& r : verify_lemma1(cfg, rng)) {
      t.rows.push_back(long_row("lemma1", n, "block-haar", {}, r.samples, "", "mean_trace_distance",
                                r.mean_trace_distance));
      t.rows.push_back(long_row("lemma1", n, "block-haar", {}, r.samples, "", "std_error", r.std_error));
    }
  }
  return t;
}

Table variance_table(const RunConfig& c, const RngStream& rng) {
  VarianceScalingConfig cfg;
  cfg.ns = c.ns;
  cfg.samples = c.samples;
  cfg.ensemble = c.ensemble == "haar" ? UnitaryEnsemble::Haar : UnitaryEnsemble::BlockHaar;
  cfg.threads = c.threads;
  Table t{kLongHeader, {}};
  for (const auto& r : verify_variance_scaling(cfg, rng)) {
    t.rows.push_back(long_row("variance-scaling", r.n, r.ensemble, {}, {}, r.observable, "mean", r.mean));
    t.rows.push_back(long_row("variance-scaling", r.n, r.ensemble, {}, {}, r.observable, "ensemble_variance",
                              r.variance));
  }
  return t;
}

Table alpha_table(const RunConfig& c) {
  const int n = c.ns.front();
  const int steps = c.steps >= 0 ? c.steps : 3 * n * n;
  Table t;
  t.header.push_back("step");
  for (int l = 0; l <= n; ++l) t.header.push_back("alpha_" + std::to_string(l));
  const auto traj = alpha_trajectory(AlphaVector::uniform(n + 1), steps, c.input_bit);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<Cell> row{static_cast<long long>(k)};
    for (int l = 0; l <= n; ++l) row.emplace_back(traj[k][l]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string cell_text(const Cell& cell) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& v) const { return v; }
  } visitor;
  return std::visit(visitor, cell);
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

// ---------------------------------------------------------------------------

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Concentration: return "concentration";
    case Experiment::EchoState: return "echo-state";
    case Experiment::Discriminate: return "discriminate";
    case Experiment::Lemma1: return "lemma1";
    case Experiment::VarianceScaling: return "variance-scaling";
    case Experiment::Alpha: return "alpha";
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::Concentration, Experiment::EchoState, Experiment::Discriminate,
                       Experiment::Lemma1, Experiment::VarianceScaling, Experiment::Alpha})
    if (name == experiment_name(e)) return e;
  return std::nullopt;
}

std::map<std::string, std::string> RunConfig::to_key_values() const {
  std::map<std::string, std::string> kv;
  kv["experiment"] = experiment_name(experiment);
  kv["ns"] = join(ns);
  kv["realizations"] = std::to_string(realizations);
  kv["washout"] = std::to_string(washout);
  kv["measure-steps"] = std::to_string(measure_steps);
  kv["W"] = format_real(W);
  kv["h"] = format_real(h);
  kv["dt"] = format_real(dt);
  kv["J-s"] = format_real(J_s);
  kv["shots"] = shots.is_exact() ? "exact" : std::to_string(*shots.n_shots);
  kv["seed"] = std::to_string(seed);
  kv["output"] = output_path;
  kv["format"] = format == OutputFormat::Csv ? "csv" : "json";
  if (phase_preset) kv["phase-preset"] = preset_name(*phase_preset);
  kv["threads"] = std::to_string(threads);
  kv["scrambler"] = scrambler;
  kv["probe-qubit"] = std::to_string(probe_qubit);
  kv["inputs-count"] = std::to_string(inputs_count);
  kv["threshold"] = format_real(threshold);
  kv["record-every"] = std::to_string(record_every);
  kv["phases"] = join(phases);
  kv["series-length"] = std::to_string(series_length);
  kv["symmetric-scrambler"] = symmetric_scrambler;
  kv["samples"] = std::to_string(samples);
  kv["ensemble"] = ensemble;
  kv["checkpoints"] = join(checkpoints);
  kv["repeats"] = std::to_string(repeats);
  if (steps >= 0) kv["steps"] = std::to_string(steps);
  kv["input-bit"] = std::to_string(input_bit);
  return kv;
}

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

std::map<std::string, std::string> parse_key_value_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    if (!known_key(key)) throw UsageError("unknown key '" + key + "' in config file");
    if (out.count(key)) throw UsageError("duplicate key '" + key + "' in config file");
    out[key] = trim(t.substr(eq + 1));
  }
  return out;
}

RunConfig parse_config(const std::vector<std::string>& args, const EnvLookup& env) {
  CLI::App app{"Quantum reservoir computing concentration experiments", "qrclab"};
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", kVersion);
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value file; flags override its values");
  for (const auto& spec : kKeys) {
    if (std::string(spec.key) == "experiment") continue;
    opts[spec.key] = app.add_option(std::string("--") + spec.key, raw[spec.key], spec.help);
  }
  std::vector<CLI::App*> subs;
  for (Experiment e : {Experiment::Concentration, Experiment::EchoState, Experiment::Discriminate,
                       Experiment::Lemma1, Experiment::VarianceScaling, Experiment::Alpha}) {
    auto* sub = app.add_subcommand(experiment_name(e), std::string("run the ") + experiment_name(e) + " experiment");
    sub->fallthrough();
    subs.push_back(sub);
  }
  app.require_subcommand(0, 1);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested(kVersion);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  std::map<std::string, std::string> values;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot read config file '" + config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    values = parse_key_value_text(buf.str());
  }
  for (const auto& [key, opt] : opts)
    if (opt->count() > 0) values[key] = raw[key];
  if (!values.count("seed"))
    if (auto s = env("QRCLAB_SEED")) {
      try {
        parse_u64("QRCLAB_SEED", *s);
      } catch (const UsageError& e) {
        throw UsageError(std::string(e.what()) + " (from environment)");
      }
      values["seed"] = *s;
    }

  std::optional<Experiment> from_cli;
  for (auto* sub : subs)
    if (sub->parsed()) from_cli = parse_experiment(sub->get_name());
  std::optional<Experiment> from_file;
  if (values.count("experiment")) {
    from_file = parse_experiment(values["experiment"]);
    if (!from_file) bad_value("experiment", values["experiment"], "unknown experiment");
  }
  if (from_cli && from_file && *from_cli != *from_file)
    throw UsageError(std::string("conflicting experiment selection: subcommand '") + experiment_name(*from_cli) +
                     "' but config file says '" + experiment_name(*from_file) + "'");
  if (!from_cli && !from_file) throw UsageError("no experiment selected; pass a subcommand (see --help)");

  RunConfig c;
  c.experiment = from_cli ? *from_cli : *from_file;
  const ExperimentDefaults d = defaults_for(c.experiment);
  c.ns = d.ns;
  c.realizations = d.realizations;
  for (const auto& [key, value] : values) apply_key(c, key, value);
  if (c.phase_preset) {
    const IsingParams p = apply_preset(ising_from(c), *c.phase_preset);
    c.W = p.W;
    c.h = p.h;
  }
  if (c.output_path.empty())
    c.output_path = std::string(experiment_name(c.experiment)) + (c.format == OutputFormat::Csv ? ".csv" : ".json");
  validate_against_experiment(c);
  return c;
}

Table run_experiment(const RunConfig& c) {
  // One root stream per experiment so different experiments never share draws.
  const RngStream rng(c.seed, 1 + static_cast<std::uint64_t>(c.experiment));
  switch (c.experiment) {
    case Experiment::Concentration: return concentration_table(c, rng);
    case Experiment::EchoState: return echo_table(c, rng);
    case Experiment::Discriminate: return discrimination_table(c, rng);
    case Experiment::Lemma1: return lemma1_table(c, rng);
    case Experiment::VarianceScaling: return variance_table(c, rng);
    case Experiment::Alpha: return alpha_table(c);
  }
  throw std::logic_error("unhandled experiment");
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& table) {
  std::string out = "[\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    out += "  {";
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ", ";
      out += json_string(table.header[i]) + ": ";
      const Cell& cell = row[i];
      if (std::holds_alternative<std::monostate>(cell)) out += "null";
      else if (const auto* s = std::get_if<std::string>(&cell)) out += json_string(*s);
      else out += cell_text(cell);
    }
    out += r + 1 < table.rows.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

int run(const RunConfig& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Table table;
  try {
    table = run_experiment(config);
  } catch (const InvariantViolation& e) {
    log << "error: numerical invariant '" << e.invariant() << "' violated: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    log << "error: numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string body = config.format == OutputFormat::Csv ? to_csv(table) : to_json(table);
  {
    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) {
      log << "error: cannot open '" << config.output_path << "' for writing\n";
      return 4;
    }
    out << body;
    if (!out) {
      log << "error: write to '" << config.output_path << "' failed\n";
      return 4;
    }
  }

  nlohmann::ordered_json meta;
  meta["experiment"] = experiment_name(config.experiment);
  meta["seed"] = config.seed;
  meta["library_version"] = kVersion;
  meta["wall_time_seconds"] = wall;
  meta["results_file"] = config.output_path;
  meta["rows"] = table.rows.size();
  nlohmann::ordered_json resolved;
  for (const auto& [k, v] : config.to_key_values()) resolved[k] = v;
  meta["config"] = resolved;
  const std::string meta_path = config.output_path + ".meta.json";
  std::ofstream meta_out(meta_path, std::ios::binary);
  if (!meta_out) {
    log << "error: cannot open '" << meta_path << "' for writing\n";
    return 4;
  }
  meta_out << meta.dump(2) << "\n";
  if (!meta_out) {
    log << "error: write to '" << meta_path << "' failed\n";
    return 4;
  }
  log << "wrote " << table.rows.size() << " rows to " << config.output_path << " (" << wall << " s)\n";
  return 0;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const HelpRequested& h) {
    out << h.what() << "\n";
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for options\n";
    return 2;
  }
  return run(config, err);
}

}  // namespace qrc::cli
