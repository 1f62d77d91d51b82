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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "cli.hpp"

using namespace qrc;
using namespace qrc::cli;
namespace fs = std::filesystem;

namespace {

EnvLookup no_env() {
  return [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
}

RunConfig parse(std::vector<std::string> args, EnvLookup env = no_env()) { return parse_config(args, env); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qrclab_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_text(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string usage_message(std::vector<std::string> args, EnvLookup env = no_env()) {
  try {
    parse_config(args, env);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults per experiment") {
  const auto c = parse({"concentration"});
  CHECK(c.experiment == Experiment::Concentration);
  CHECK(c.ns == std::vector<int>{3, 4, 5, 6, 7});
  CHECK(c.realizations == 100);
  CHECK(c.washout == 200);
  CHECK(c.W == 1e-2);
  CHECK(c.h == 10.0);
  CHECK(c.dt == 10.0);
  CHECK(c.seed == 0);
  CHECK(c.shots.is_exact());
  CHECK(c.output_path == "concentration.csv");
  CHECK(parse({"echo-state"}).ns == std::vector<int>{7});
  CHECK(parse({"echo-state"}).realizations == 20);
  CHECK(parse({"discriminate", "--format", "json"}).output_path == "discriminate.json");
}

TEST_CASE("phase preset overrides W and h") {
  const auto c = parse({"concentration", "--phase-preset", "localized", "--W", "3"});
  CHECK(c.W == 1e2);
  CHECK(c.h == 10.0);
}

TEST_CASE("flags accept the documented forms") {
  const auto c = parse({"concentration", "--ns", "3,5", "--shots", "1000", "--W", "0.5", "--h", "2", "--threads",
                        "2", "--seed", "18446744073709551615"});
  CHECK(c.ns == std::vector<int>{3, 5});
  CHECK(*c.shots.n_shots == 1000);
  CHECK(c.W == 0.5);
  CHECK(c.h == 2.0);
  CHECK(c.threads == 2);
  CHECK(c.seed == 18446744073709551615ull);
}

TEST_CASE("invalid values are usage errors naming the key") {
  CHECK(usage_message({"concentration", "--ns", "0"}).find("'ns'") != std::string::npos);
  CHECK(usage_message({"concentration", "--ns", "3,x"}).find("'ns'") != std::string::npos);
  CHECK(usage_message({"concentration", "--dt", "-1"}).find("'dt'") != std::string::npos);
  CHECK(usage_message({"concentration", "--shots", "0"}).find("'shots'") != std::string::npos);
  CHECK(usage_message({"concentration", "--seed", "-4"}).find("'seed'") != std::string::npos);
  CHECK(usage_message({"concentration", "--phase-preset", "glassy"}).find("'phase-preset'") != std::string::npos);
  CHECK(usage_message({"concentration", "--ns", "12"}).find("'ns'") != std::string::npos);
  CHECK(usage_message({"alpha", "--ns", "3,4"}).find("'ns'") != std::string::npos);
  CHECK_FALSE(usage_message({"concentration", "--bogus", "1"}).empty());
  CHECK_FALSE(usage_message({}).empty());
}

TEST_CASE("config file values, flag precedence and unknown keys") {
  const auto path = write_text("good.cfg", "# comment\nexperiment = concentration\nrealizations=7\nseed=5\n");
  const auto c = parse({"--config", path, "--seed", "9"});
  CHECK(c.experiment == Experiment::Concentration);
  CHECK(c.realizations == 7);
  CHECK(c.seed == 9);

  const auto bad = write_text("bad.cfg", "realisations=7\n");
  CHECK(usage_message({"concentration", "--config", bad}).find("realisations") != std::string::npos);
  const auto malformed = write_text("malformed.cfg", "realizations 7\n");
  CHECK_FALSE(usage_message({"concentration", "--config", malformed}).empty());
  CHECK_FALSE(usage_message({"concentration", "--config", scratch("missing.cfg").string()}).empty());
}

TEST_CASE("conflicting experiment selection is rejected") {
  const auto path = write_text("echo.cfg", "experiment=echo-state\n");
  CHECK(usage_message({"concentration", "--config", path}).find("conflicting") != std::string::npos);
  CHECK(parse({"echo-state", "--config", path}).experiment == Experiment::EchoState);
}

TEST_CASE("seed falls back to the environment") {
  auto env = [](const std::string& name) -> std::optional<std::string> {
    if (name == "QRCLAB_SEED") return "77";
    return std::nullopt;
  };
  CHECK(parse({"lemma1"}, env).seed == 77);
  CHECK(parse({"lemma1", "--seed", "3"}, env).seed == 3);
  const auto path = write_text("seed.cfg", "seed=4\n");
  CHECK(parse({"lemma1", "--config", path}, env).seed == 4);
  auto broken = [](const std::string&) -> std::optional<std::string> { return "abc"; };
  CHECK_FALSE(usage_message({"lemma1"}, broken).empty());
}

TEST_CASE("key=value parsing") {
  const auto kv = parse_key_value_text("ns = 3,4\n\n  # note\nW=0.1\n");
  CHECK(kv.at("ns") == "3,4");
  CHECK(kv.at("W") == "0.1");
  CHECK_THROWS_AS(parse_key_value_text("ns=3\nns=4\n"), UsageError);
}

TEST_CASE("resolved config round-trips through a config file") {
  const auto c = parse({"discriminate", "--ns", "4", "--realizations", "3", "--seed", "11", "--W", "0.25"});
  std::string text;
  for (const auto& [k, v] : c.to_key_values()) text += k + "=" + v + "\n";
  const auto again = parse({"--config", write_text("roundtrip.cfg", text)});
  CHECK(again.to_key_values() == c.to_key_values());
}

TEST_CASE("alpha table has a wide header") {
  auto c = parse({"alpha", "--ns", "2", "--steps", "2"});
  const auto t = run_experiment(c);
  CHECK(to_csv(t) == "step,alpha_0,alpha_1,alpha_2\n"
                     "0,0.33333333333333331,0.33333333333333331,0.33333333333333331\n"
                     "1,0,0.5,0.5\n"
                     "2,0,0.25,0.75\n");
}

TEST_CASE("json output uses null for empty cells") {
  Table t{{"a", "b"}, {{std::string("x"), Cell{}}, {1LL, 0.5}}};
  CHECK(to_json(t) == "[\n  {\"a\": \"x\", \"b\": null},\n  {\"a\": 1, \"b\": 0.5}\n]\n");
  CHECK(to_csv(t) == "a,b\nx,\n1,0.5\n");
}

TEST_CASE("output is byte-identical across thread counts") {
  const std::string a = scratch("one.csv").string(), b = scratch("three.csv").string();
  std::ostringstream out, err;
  const std::vector<std::string> base{"concentration", "--ns", "3,4", "--realizations", "3", "--washout", "5",
                                      "--measure-steps", "10", "--seed", "12"};
  auto with = [&](std::string threads, std::string path) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads, "--output", path});
    return args;
  };
  REQUIRE(main_entry(with("1", a), out, err) == 0);
  REQUIRE(main_entry(with("3", b), out, err) == 0);
  CHECK(read_text(a) == read_text(b));
  CHECK(read_text(a).rfind("experiment,n,setting,realization,step,observable,quantity,value\n", 0) == 0);
  CHECK(read_text(a + ".meta.json").find("\"seed\": 12") != std::string::npos);
}

TEST_CASE("main_entry exit codes") {
  std::ostringstream out, err;
  CHECK(main_entry({"--help"}, out, err) == 0);
  CHECK(out.str().find("concentration") != std::string::npos);
  CHECK(main_entry({"concentration", "--ns", "0"}, out, err) == 2);
  CHECK(err.str().find("'ns'") != std::string::npos);
  const std::string unwritable = (scratch("no_such_dir") / "x" / "out.csv").string();
  CHECK(main_entry({"alpha", "--ns", "2", "--output", unwritable}, out, err) == 4);
}
