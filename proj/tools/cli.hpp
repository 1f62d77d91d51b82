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

// Command-line front end: configuration resolution, experiment dispatch and
// CSV/JSON emission.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qrclab/measurement.hpp"
#include "qrclab/reservoir.hpp"

namespace qrc::cli {

/// Bad command line or config file. Exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was requested; what() is the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { Concentration, EchoState, Discriminate, Lemma1, VarianceScaling, Alpha };
enum class OutputFormat { Csv, Json };

const char* experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& name);

struct RunConfig {
  Experiment experiment = Experiment::Concentration;
  std::vector<int> ns;
  int realizations = 100;
  int washout = 200;
  int measure_steps = 200;
  double W = 1e-2;
  double h = 10.0;
  double dt = 10.0;
  double J_s = 1.0;
  ShotConfig shots = ShotConfig::exact();
  std::uint64_t seed = 0;
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;
  std::optional<PhasePreset> phase_preset;
  int threads = 1;

  // Experiment-specific knobs.
  std::string scrambler = "ising";               // concentration
  int probe_qubit = 1;                           // concentration
  int inputs_count = 500;                        // echo-state
  double threshold = 1e-10;                      // echo-state
  int record_every = 10;                         // echo-state
  std::vector<std::string> phases{"thermal-main", "localized"};  // echo-state
  int series_length = 1000;                      // discriminate
  std::string symmetric_scrambler = "block-haar";  // discriminate
  int samples = 10000;                           // variance-scaling
  std::string ensemble = "haar";                 // variance-scaling
  std::vector<long long> checkpoints{100, 1000, 10000};  // lemma1
  int repeats = 10;                              // lemma1
  int steps = -1;                                // alpha; -1 means 3 n^2
  int input_bit = 1;                             // alpha

  /// Every setting as the flat key=value map accepted by --config.
  std::map<std::string, std::string> to_key_values() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Parses a flat key=value file. Blank lines and '#' comments are skipped.
std::map<std::string, std::string> parse_key_value_text(const std::string& text);

/// Resolves a RunConfig from argv (without the program name). Precedence:
/// flags, then --config file values, then QRCLAB_SEED for the seed, then
/// defaults.
RunConfig parse_config(const std::vector<std::string>& args, const EnvLookup& env = process_env);

/// Cell of a result table; monostate renders as an empty field / null.
using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

/// Runs the configured experiment in-process.
Table run_experiment(const RunConfig& config);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

/// Executes the experiment and writes the results file plus
/// `<output>.meta.json`. Returns the process exit code.
int run(const RunConfig& config, std::ostream& log);

/// Full entry point used by main().
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qrc::cli
