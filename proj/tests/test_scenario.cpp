// Copyright 2026 The qtopos developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtopos/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "qtopos/linops.hpp"

using namespace qtopos;
using scenario::Json;
using scenario::RunResult;
using scenario::Scenario;

namespace {

void expect_validation(const std::string& text) {
  CHECK_THROWS_AS(scenario::parse_scenario(text, "t"), ValidationError);
}

// Minimal valid preamble for exercising one command at a time.
std::string with_command(const std::string& cmd) {
  return std::string(
             R"({"dimension":2,)"
             R"("states":{"s":[[1,0],[0,0]]},)"
             R"("projections":{"P":[[[1,0],[0,0]],[[0,0],[0,0]]]},)"
             R"("commands":[)") +
         cmd + "]}";
}

std::vector<std::string> sorted_labels(const Json& arr) {
  std::vector<std::string> out;
  for (const Json& x : arr) out.push_back(x.get<std::string>());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<long long> sorted_classes(const Json& counts) {
  std::vector<long long> out;
  for (const auto& [k, v] : counts.items())
    if (k.rfind("class_", 0) == 0) out.push_back(v.get<long long>());
  std::sort(out.begin(), out.end());
  return out;
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

Scenario demo_scenario() {
  Scenario sc = scenario::scenario_of_fixture(fixtures::fixture_a());
  sc.commands = Json::parse(R"([
    {"command": "daseinize", "projection": "P0", "flavor": "sheaf"},
    {"command": "assign", "state": "e0", "projection": "P0", "r": 1},
    {"command": "translate", "projection": "P0"},
    {"command": "translate", "projection": "P0", "state": "e0", "r": 1},
    {"command": "verify", "theorem": "all"},
    {"command": "ks-check", "fixture": "self"},
    {"command": "dot", "file": "poset.dot", "state": "e0",
     "projection": "P0", "r": 1}
  ])");
  return sc;
}

}  // namespace

TEST_CASE("parsing a fully featured scenario") {
  const std::string text = R"({
    "name": "demo",
    "dimension": 2,
    "observables": {"z": [[[1,0],[0,0]],[[0,0],[-1,0]]]},
    "seed_contexts": {"x": [[[[0,0],[1,0]],[[1,0],[0,0]]]]},
    "states": {
      "rho": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]],
      "psi": [[3,0],[4,0]]
    },
    "projections": {"P0": [[[1,0],[0,0]],[[0,0],[0,0]]]},
    "r_values": [0, 1],
    "options": {"epsilon": 1e-4, "max_contexts": 32, "seed": 7, "guard": 1000},
    "commands": [{"command": "daseinize", "projection": "P0"}]
  })";
  Scenario sc = scenario::parse_scenario(text, "fallback");
  CHECK(sc.name == "demo");
  CHECK(sc.dimension == 2);
  REQUIRE(sc.observables.size() == 1);
  CHECK(sc.observables[0].name == "z");
  CHECK(sc.observables[0].op(0, 0) == std::complex<double>(1, 0));
  CHECK(sc.observables[0].op(1, 1) == std::complex<double>(-1, 0));
  REQUIRE(sc.seeds.size() == 1);
  CHECK(sc.seeds[0].name == "x");
  REQUIRE(sc.seeds[0].gens.size() == 1);
  CHECK(sc.seeds[0].gens[0](0, 1) == std::complex<double>(1, 0));
  REQUIRE(sc.states.size() == 2);
  CHECK(sc.states[0].first == "rho");
  CHECK(std::abs(sc.states[0].second(0, 0).real() - 0.5) < 1e-12);
  // unnormalized vectors become normalized rank-one densities
  CHECK(sc.states[1].first == "psi");
  CHECK(std::abs(sc.states[1].second(0, 0).real() - 0.36) < 1e-12);
  CHECK(std::abs(sc.states[1].second(1, 1).real() - 0.64) < 1e-12);
  CHECK(std::abs(sc.states[1].second(0, 1).real() - 0.48) < 1e-12);
  REQUIRE(sc.projections.size() == 1);
  CHECK(sc.r_values == std::vector<double>{0, 1});
  CHECK(sc.options.eps == 1e-4);
  CHECK(sc.options.max_contexts == 32);
  CHECK(sc.options.seed == 7);
  CHECK(sc.guard == 1000);
  CHECK(sc.commands.size() == 1);

  Scenario unnamed = scenario::parse_scenario(R"({"dimension": 2})", "fb");
  CHECK(unnamed.name == "fb");
}

TEST_CASE("malformed JSON raises a parse error, not a validation one") {
  CHECK_THROWS_AS(scenario::parse_scenario("{oops", "t"), ParseError);
  CHECK_THROWS_AS(scenario::parse_scenario("", "t"), ParseError);
  CHECK_THROWS_AS(scenario::load_scenario("/no/such/file.json"), ParseError);
}

TEST_CASE("schema violations raise validation errors") {
  expect_validation("[]");
  expect_validation("{}");
  expect_validation(R"({"dimension": "two"})");
  expect_validation(R"({"dimension": 0})");
  expect_validation(R"({"dimension": 17})");
  // matrix shape and complex-pair shape
  expect_validation(R"({"dimension":2,"observables":{"z":[[[1,0],[0,0]]]}})");
  expect_validation(
      R"({"dimension":2,"observables":{"z":[[[1,0],[0,0]],[[0,0],[-1]]]}})");
  // seed contexts must list generators
  expect_validation(R"({"dimension":2,"seed_contexts":{"x":{}}})");
  expect_validation(R"({"dimension":2,"seed_contexts":{"x":[]}})");
  // states: wrong arity, vanishing norm, non-density matrix
  expect_validation(R"({"dimension":2,"states":{"s":[[1,0]]}})");
  expect_validation(R"({"dimension":2,"states":{"s":[[0,0],[0,0]]}})");
  expect_validation(
      R"({"dimension":2,"states":{"s":[[[1,0],[0,0]],[[0,0],[1,0]]]}})");
  // projections must be projections
  expect_validation(
      R"({"dimension":2,"projections":{"P":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}})");
  // r grid
  expect_validation(R"({"dimension":2,"r_values":3})");
  expect_validation(R"({"dimension":2,"r_values":[2]})");
  expect_validation(R"({"dimension":2,"r_values":["x"]})");
  // options
  expect_validation(R"({"dimension":2,"options":{"epsilon":0}})");
  expect_validation(R"({"dimension":2,"options":{"epsilon":0.5}})");
  expect_validation(R"({"dimension":2,"options":{"max_contexts":0}})");
  expect_validation(R"({"dimension":2,"options":{"guard":0}})");
  // command list shape
  expect_validation(R"({"dimension":2,"commands":{}})");
}

TEST_CASE("command validation happens at parse time") {
  expect_validation(with_command(R"({"command": 5})"));
  expect_validation(with_command(R"({"command": "frobnicate"})"));
  expect_validation(with_command(R"({"command": "daseinize"})"));
  expect_validation(
      with_command(R"({"command": "daseinize", "projection": "nope"})"));
  expect_validation(with_command(
      R"({"command": "daseinize", "projection": "P", "flavor": "both"})"));
  expect_validation(
      with_command(R"({"command": "assign", "state": "s", "projection": "P"})"));
  expect_validation(with_command(
      R"({"command": "assign", "state": "s", "projection": "P", "r": 1.5})"));
  expect_validation(with_command(
      R"({"command": "assign", "state": "nope", "projection": "P", "r": 1})"));
  expect_validation(with_command(R"({"command": "verify"})"));
  expect_validation(with_command(R"({"command": "verify", "theorem": 4})"));
  expect_validation(with_command(R"({"command": "dot", "file": ""})"));
  expect_validation(with_command(R"({"command": "dot", "file": "a/b.dot"})"));
  expect_validation(with_command(R"({"command": "ks-check", "fixture": "x"})"));
  expect_validation(
      with_command(R"({"command": "ks-check", "rays": [], "dim": 3})"));
  expect_validation(
      with_command(R"({"command": "ks-check", "rays": [[1,0,0]]})"));

  // well-formed commands of every kind pass validation
  CHECK_NOTHROW(scenario::parse_scenario(
      with_command(
          R"({"command": "daseinize", "projection": "P", "flavor": "presheaf"},)"
          R"({"command": "assign", "state": "s", "projection": "P", "r": 0.5},)"
          R"({"command": "translate", "projection": "P"},)"
          R"({"command": "verify", "theorem": 1},)"
          R"({"command": "ks-check", "fixture": "self"},)"
          R"({"command": "dot", "file": "out.dot"})"),
      "t"));
}

TEST_CASE("loading a scenario file derives the name from the stem") {
  const std::string path = "/tmp/qtopos_scn_check.json";
  {
    std::ofstream out(path);
    out << R"({"dimension": 2})";
  }
  Scenario sc = scenario::load_scenario(path);
  CHECK(sc.name == "qtopos_scn_check");
  std::remove(path.c_str());
}

TEST_CASE("fixture scenarios carry basis states and a default grid") {
  Scenario a = scenario::scenario_of_fixture(fixtures::fixture_a());
  CHECK(a.name == "qubit_zx");
  CHECK(a.dimension == 2);
  REQUIRE(a.states.size() == 3);
  CHECK(a.states[0].first == "e0");
  CHECK(a.states[1].first == "e1");
  CHECK(a.states[2].first == "plus");
  for (const auto& [name, rho] : a.states) {
    (void)name;
    CHECK(linops::is_hermitian(rho, 1e-12));
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
  }
  REQUIRE(a.projections.size() == 1);
  CHECK(a.projections[0].first == "P0");
  CHECK(a.projections[0].second(0, 0) == std::complex<double>(1, 0));
  CHECK(a.r_values == std::vector<double>{0, 0.3, 0.5, 0.9, 1});

  Scenario c = scenario::scenario_of_fixture(fixtures::fixture_c());
  CHECK(c.dimension == 3);
  CHECK(c.states.size() == 4);
}

TEST_CASE("a full command run over the two-armed qubit poset") {
  RunResult rr = scenario::run_scenario(demo_scenario());
  CHECK(rr.pass);
  const Json& rep = rr.report;
  CHECK(rep["scenario"] == "qubit_zx");
  CHECK(rep["dimension"] == 2);
  CHECK(rep["pass"] == true);

  const Json& poset = rep["poset"];
  CHECK(poset["bottom"] == "CI");
  CHECK(poset["contexts"].size() == 3);
  CHECK(poset["covers"].size() == 2);
  for (const Json& c : poset["contexts"]) {
    const std::string label = c["label"].get<std::string>();
    if (label == "Vx") {
      CHECK(c["flat"] == "CI");
      CHECK(c["n_min"] == 2);
    } else {
      CHECK(c["flat"] == label);
    }
  }

  const Json& results = rep["results"];
  REQUIRE(results.size() == 7);

  const Json& das = results[0];
  CHECK(das["command"] == "daseinize");
  CHECK(das["flavor"] == "sheaf");
  CHECK(das["stages"]["CI"] == Json::array({0}));
  CHECK(das["stages"]["Vx"] == Json::array({0}));
  CHECK(das["stages"]["phi(a)"].size() == 1);

  const Json& asg = results[1];
  CHECK(asg["command"] == "assign");
  CHECK(asg["closed"] == true);
  CHECK(sorted_labels(asg["truth_value"]["downset"]) ==
        std::vector<std::string>{"CI", "Vx", "phi(a)"});
  CHECK(sorted_labels(asg["truth_value"]["sieves"]["phi(a)"]) ==
        std::vector<std::string>{"CI", "phi(a)"});

  const Json& tp = results[2];
  CHECK(tp["command"] == "translate");
  CHECK(tp["translation"] == true);
  CHECK(tp["in_interval"] == true);
  CHECK(tp["iota_min"]["Vx"] == Json::array());
  CHECK(tp["iota_max"]["Vx"] == Json::array({0, 1}));
  CHECK(tp["stages_closed"]["Vx"] == Json::array({0}));

  const Json& tt = results[3];
  CHECK(tt["translation"] == true);
  CHECK(sorted_labels(tt["value"]["downset"]).size() == 3);
  CHECK(sorted_labels(tt["gamma_min"]) ==
        std::vector<std::string>{"CI", "phi(a)"});
  CHECK(sorted_labels(tt["gamma_max"]).size() == 3);

  const Json& ver = results[4];
  CHECK(ver["pass"] == true);
  REQUIRE(ver["reports"].size() == 3);
  CHECK(ver["reports"][0]["counts"]["global_elements"] == 5);
  CHECK(ver["reports"][0]["counts"]["closed_global_elements"] == 3);
  CHECK(sorted_classes(ver["reports"][0]["counts"]) ==
        std::vector<long long>{1, 2, 2});
  CHECK(ver["reports"][1]["counts"]["presheaf_subobjects"] == 17);
  CHECK(ver["reports"][1]["counts"]["sheaf_subobjects"] == 5);
  CHECK(sorted_classes(ver["reports"][1]["counts"]) ==
        std::vector<long long>{1, 4, 4, 4, 4});
  CHECK(ver["reports"][2]["counts"]["truth_presheaves"] == 62);
  CHECK(ver["reports"][2]["counts"]["non_translations"] == 0);
  CHECK(ver["reports"][2]["counts"]["samples"] == 18);
  CHECK(ver["reports"][2]["skipped_not_filter"] == 2);

  const Json& ksr = results[5];
  CHECK(ksr["name"] == "self");
  CHECK(ksr["contexts"] == 3);
  CHECK(ksr["sections"] == 2);

  const Json& dot = results[6];
  CHECK(dot["nodes"] == 3);
  CHECK(dot["solid_edges"] == 2);
  CHECK(dot["dashed_edges"] == 1);
  REQUIRE(rr.dot_files.size() == 1);
  CHECK(rr.dot_files[0].first == "poset.dot");
  // the truth value colors the full downset here
  const std::string& doc = rr.dot_files[0].second;
  int filled = 0;
  for (size_t pos = doc.find("style=filled"); pos != std::string::npos;
       pos = doc.find("style=filled", pos + 1))
    ++filled;
  CHECK(filled == 3);
}

TEST_CASE("an empty command list yields an empty passing report") {
  Scenario sc = scenario::scenario_of_fixture(fixtures::fixture_a());
  RunResult rr = scenario::run_scenario(sc);
  CHECK(rr.pass);
  CHECK(rr.report["results"] == Json::array());
  CHECK(rr.dot_files.empty());
}

TEST_CASE("reports are byte-identical across repeated runs") {
  Scenario sc = demo_scenario();
  RunResult a = scenario::run_scenario(sc);
  RunResult b = scenario::run_scenario(sc);
  CHECK(a.report.dump(2) == b.report.dump(2));
  CHECK(a.dot_files == b.dot_files);
  RunResult timed = scenario::run_scenario(sc, true);
  CHECK(timed.report["results"][0].contains("ms"));
}

TEST_CASE("run-time validation catches malformed ray entries") {
  Scenario sc = scenario::parse_scenario(
      with_command(R"({"command": "ks-check", "rays": [["x"]], "dim": 2})"),
      "t");
  CHECK_THROWS_AS(scenario::run_scenario(sc), ValidationError);
}

TEST_CASE("dot export draws covers solid and flat collapses dashed") {
  contexts::ContextPoset w = fixtures::build_fixture(fixtures::fixture_a());
  const std::string plain = scenario::export_dot(w);
  CHECK(count_lines(plain) == 10);
  CHECK(plain.rfind("digraph contexts {", 0) == 0);
  CHECK(plain.find("rankdir=BT") != std::string::npos);
  CHECK(plain.find("  \"CI\" -> \"phi(a)\";\n") != std::string::npos);
  CHECK(plain.find("  \"CI\" -> \"Vx\";\n") != std::string::npos);
  CHECK(plain.find("  \"Vx\" -> \"CI\" [style=dashed];\n") !=
        std::string::npos);
  CHECK(plain.find("style=filled") == std::string::npos);
  CHECK(plain.back() == '\n');

  const int bot = w.find_by_label("CI");
  const int vx = w.find_by_label("Vx");
  IdSet down(w.size());
  down.set(bot);
  down.set(vx);
  presheaves::TruthValue tv = presheaves::truth_value_from_downset(w, down);
  const std::string colored = scenario::export_dot(w, &tv);
  CHECK(colored.find("  \"CI\" [style=filled, fillcolor=lightblue];\n") !=
        std::string::npos);
  CHECK(colored.find("  \"Vx\" [style=filled, fillcolor=lightblue];\n") !=
        std::string::npos);
  CHECK(colored.find("  \"phi(a)\";\n") != std::string::npos);
  CHECK(count_lines(colored) == 10);
}

TEST_CASE("the verifier command pins the first classifier example") {
  const std::string text = R"({
    "dimension": 2,
    "observables": {"a": [[[1,0],[0,0]],[[0,0],[-1,0]]]},
    "seed_contexts": {"Vx": [[[[0,0],[1,0]],[[1,0],[0,0]]]]},
    "commands": [{"command": "verify", "theorem": 1}]
  })";
  Scenario sc = scenario::parse_scenario(text, "example");
  RunResult rr = scenario::run_scenario(sc);
  CHECK(rr.pass);
  const Json& rep = rr.report["results"][0]["reports"][0];
  CHECK(rep["pass"] == true);
  CHECK(sorted_classes(rep["counts"]) == std::vector<long long>{1, 2, 2});
}
