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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qtopos/fixtures.hpp"
#include "qtopos/ks.hpp"
#include "qtopos/scenario.hpp"

namespace fs = std::filesystem;
using namespace qtopos;

namespace {

struct Overrides {
  std::optional<double> epsilon;
  std::optional<int> max_contexts;
  std::optional<long long> guard;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  bool timing = false;
};

void apply(const Overrides& ov, scenario::Scenario* sc) {
  if (ov.epsilon) sc->options.eps = *ov.epsilon;
  if (ov.max_contexts) sc->options.max_contexts = *ov.max_contexts;
  if (ov.guard) sc->guard = *ov.guard;
  if (ov.seed) sc->options.seed = *ov.seed;
}

fixtures::Fixture fixture_by_name(const std::string& n) {
  if (n == "qubit_zx") return fixtures::fixture_a();
  if (n == "chain5") return fixtures::fixture_b();
  if (n == "qutrit_chain") return fixtures::fixture_c();
  if (n == "single") return fixtures::trivial_fixture();
  throw ValidationError("unknown fixture: " + n);
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

void emit(const scenario::Json& report,
          const std::vector<std::pair<std::string, std::string>>& dots,
          const Overrides& ov) {
  if (ov.out) {
    fs::create_directories(*ov.out);
    write_text(fs::path(*ov.out) / "report.json", report.dump(2) + "\n");
    for (const auto& [name, text] : dots)
      write_text(fs::path(*ov.out) / name, text);
    std::cerr << "report written to " << (fs::path(*ov.out) / "report.json")
              << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
    for (const auto& [name, text] : dots) write_text(name, text);
  }
}

void summarize(const scenario::Json& report) {
  if (!report.contains("results")) return;
  for (const auto& res : report["results"]) {
    const std::string cmd = res.value("command", std::string());
    if (cmd == "verify") {
      for (const auto& rep : res["reports"])
        std::cerr << (rep["pass"].get<bool>() ? "[PASS] " : "[FAIL] ")
                  << rep["title"].get<std::string>() << "\n";
    } else if (cmd == "ks-check") {
      std::cerr << "[ks] " << res["name"].get<std::string>() << ": "
                << res["sections"].get<long long>() << " global sections over "
                << res["contexts"].get<int>() << " contexts\n";
    }
  }
}

int run_result(const scenario::Scenario& sc, const Overrides& ov) {
  scenario::Scenario copy = sc;
  apply(ov, &copy);
  scenario::RunResult rr = scenario::run_scenario(copy, ov.timing);
  emit(rr.report, rr.dot_files, ov);
  summarize(rr.report);
  return rr.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "truth values of quantum propositions over finite posets of commuting "
      "contexts"};
  app.require_subcommand(1);

  Overrides ov;
  app.add_option("--epsilon", ov.epsilon, "numeric tolerance");
  app.add_option("--max-contexts", ov.max_contexts, "context count cap");
  app.add_option("--guard", ov.guard, "enumeration work cap");
  app.add_option("--seed", ov.seed, "rng seed for minimal projection search");
  app.add_option("--out", ov.out, "output directory for report and dot files");
  app.add_flag("--timing", ov.timing, "record per-command wall time");

  auto* cmd_run = app.add_subcommand("run", "execute a scenario file");
  cmd_run->fallthrough();
  std::string run_file;
  cmd_run->add_option("file", run_file, "scenario JSON file")->required();

  auto* cmd_verify =
      app.add_subcommand("verify", "check the classification theorems");
  cmd_verify->fallthrough();
  std::string verify_which = "all";
  std::string verify_fixture = "qubit_zx";
  cmd_verify->add_option("theorem", verify_which,
                         "which theorem: 1, 2, 3 or all");
  cmd_verify->add_option("--fixture", verify_fixture,
                         "qubit_zx, chain5, qutrit_chain or single");

  auto* cmd_ks = app.add_subcommand("ks", "count global sections of a ray set");
  cmd_ks->fallthrough();
  std::string ks_set;
  bool ks_parallel = false;
  cmd_ks->add_option("set", ks_set, "peres33 or cabello18")->required();
  cmd_ks->add_flag("--parallel", ks_parallel, "use the parallel section count");

  auto* cmd_dot = app.add_subcommand("dot", "write a context poset as graphviz");
  cmd_dot->fallthrough();
  std::string dot_fixture = "qubit_zx";
  std::string dot_file = "poset.dot";
  cmd_dot->add_option("--fixture", dot_fixture,
                      "qubit_zx, chain5, qutrit_chain or single");
  cmd_dot->add_option("--file", dot_file, "output file name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_run->parsed()) {
      return run_result(scenario::load_scenario(run_file), ov);
    }
    if (cmd_verify->parsed()) {
      if (verify_which != "1" && verify_which != "2" && verify_which != "3" &&
          verify_which != "all")
        throw ValidationError("theorem must be 1, 2, 3 or all");
      scenario::Scenario sc =
          scenario::scenario_of_fixture(fixture_by_name(verify_fixture));
      scenario::Json c = scenario::Json::object();
      c["command"] = "verify";
      c["theorem"] = verify_which;
      sc.commands.push_back(c);
      return run_result(sc, ov);
    }
    if (cmd_ks->parsed()) {
      ks::KSOptions opts;
      if (ov.epsilon) opts.eps = *ov.epsilon;
      if (ov.max_contexts) opts.max_contexts = *ov.max_contexts;
      if (ov.guard) opts.guard = *ov.guard;
      if (ov.seed) opts.seed = *ov.seed;
      opts.mode = ks_parallel ? Exec::Parallel : Exec::Serial;
      ks::KSResult res;
      if (ks_set == "peres33")
        res = ks::ks_check_rays("peres33", ks::peres33_rays(), 3, opts);
      else if (ks_set == "cabello18")
        res = ks::ks_check_rays("cabello18", ks::cabello18_rays(), 4, opts);
      else
        throw ValidationError("unknown ray set: " + ks_set);
      scenario::Json report = scenario::Json::object();
      report["name"] = res.name;
      report["dim"] = res.dim;
      report["rays"] = res.n_rays;
      report["bases"] = res.n_bases;
      report["cliques"] = res.n_cliques;
      report["contexts"] = res.n_contexts;
      report["sections"] = res.sections;
      emit(report, {}, ov);
      std::cerr << "[ks] " << res.name << ": " << res.sections
                << " global sections over " << res.n_contexts << " contexts\n";
      return res.sections == 0 ? 0 : 1;
    }
    if (cmd_dot->parsed()) {
      fixtures::Fixture f = fixture_by_name(dot_fixture);
      scenario::Scenario sc = scenario::scenario_of_fixture(f);
      apply(ov, &sc);
      contexts::ContextPoset w =
          contexts::build_poset(sc.dimension, sc.observables, sc.seeds, sc.options);
      const std::string text = scenario::export_dot(w, nullptr);
      const fs::path dir = ov.out ? fs::path(*ov.out) : fs::path(".");
      if (ov.out) fs::create_directories(dir);
      write_text(dir / dot_file, text);
      std::cerr << "wrote " << (dir / dot_file) << "\n";
      return 0;
    }
  } catch (const ParseError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const SizeLimit& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 4;
  } catch (const Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 2;
}
