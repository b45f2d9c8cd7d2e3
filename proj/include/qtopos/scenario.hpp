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

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qtopos/fixtures.hpp"
#include "qtopos/presheaves.hpp"

namespace qtopos::scenario {

using Json = nlohmann::ordered_json;

// A declarative run: poset ingredients, named states and projections, and
// a command list.  Commands: daseinize, assign, translate, verify,
// ks-check, dot.
struct Scenario {
  std::string name;
  int dimension = 0;
  std::vector<contexts::Observable> observables;
  std::vector<contexts::SeedContext> seeds;
  std::vector<std::pair<std::string, linops::Mat>> states;  // densities
  std::vector<std::pair<std::string, linops::Mat>> projections;
  std::vector<double> r_values;
  contexts::BuildOptions options;
  long long guard = 2000000;
  Json commands = Json::array();
};

// Throws ParseError on malformed JSON, ValidationError on schema or data
// violations (including unresolved names inside commands).
Scenario parse_scenario(const std::string& text, const std::string& name);
// Reads the file; unreadable files raise ParseError.
Scenario load_scenario(const std::string& path);

struct RunResult {
  Json report;
  // DOT documents requested by dot commands, keyed by file name.
  std::vector<std::pair<std::string, std::string>> dot_files;
  bool pass = true;  // false iff some verification clause failed
};

// Executes the commands in order.  The report is deterministic for a fixed
// scenario; `timing` adds wall-clock fields and breaks reproducibility.
RunResult run_scenario(const Scenario& sc, bool timing = false);

// DOT digraph of the Hasse diagram: solid cover edges drawn upward, dashed
// edges v -> flat(v) wherever flat moves v; nodes in `color` are filled.
std::string export_dot(const contexts::ContextPoset& w,
                       const presheaves::TruthValue* color = nullptr);

// Scenario wrapping a fixture, with computational-basis states, a uniform
// superposition, a basis projection, and a default r grid.
Scenario scenario_of_fixture(const fixtures::Fixture& f);

}  // namespace qtopos::scenario
