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

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qtopos/ks.hpp"
#include "qtopos/translate.hpp"

namespace qtopos::scenario {

using linops::Mat;
using linops::Vec;
using spectral::Flavor;

namespace {

linops::Cplx parse_cplx(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("complex entries must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

Mat parse_matrix(const Json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ValidationError("matrix must have one row per dimension");
  Mat m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw ValidationError("matrix row of wrong length");
    for (int c = 0; c < dim; ++c) m(r, c) = parse_cplx(row[c]);
  }
  return m;
}

Vec parse_vector(const Json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ValidationError("state vector must have one entry per dimension");
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = parse_cplx(j[i]);
  return v;
}

Mat parse_state(const Json& j, int dim) {
  if (j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() &&
      j[0][0].is_array()) {
    Mat rho = parse_matrix(j, dim);
    try {
      linops::validate_density(rho);
    } catch (const InvalidInput& ex) {
      throw ValidationError(std::string("state: ") + ex.what());
    }
    return rho;
  }
  Vec v = parse_vector(j, dim);
  const double n = v.norm();
  if (n < 1e-9) throw ValidationError("state vector has vanishing norm");
  v /= n;
  return v * v.adjoint();
}

const Mat& named(const std::vector<std::pair<std::string, Mat>>& table,
                 const std::string& key, const char* what) {
  for (const auto& [n, m] : table)
    if (n == key) return m;
  throw ValidationError(std::string("unknown ") + what + ": " + key);
}

Flavor flavor_of(const Json& c) {
  const std::string s = c.value("flavor", std::string("sheaf"));
  if (s == "presheaf") return Flavor::Presheaf;
  if (s == "sheaf") return Flavor::Sheaf;
  throw ValidationError("flavor must be 'presheaf' or 'sheaf'");
}

std::string theorem_of(const Json& c) {
  if (!c.contains("theorem")) throw ValidationError("verify needs a theorem");
  const Json& t = c["theorem"];
  if (t.is_number_integer()) {
    const int k = t.get<int>();
    if (k >= 1 && k <= 3) return std::to_string(k);
  } else if (t.is_string()) {
    const std::string s = t.get<std::string>();
    if (s == "1" || s == "2" || s == "3" || s == "all") return s;
  }
  throw ValidationError("theorem must be 1, 2, 3 or 'all'");
}

double r_of(const Json& c) {
  if (!c.contains("r") || !c["r"].is_number())
    throw ValidationError("command needs a numeric 'r'");
  const double r = c["r"].get<double>();
  if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("r must lie in [0, 1]");
  return r;
}

std::string dot_file_of(const Json& c) {
  const std::string f = c.value("file", std::string("poset.dot"));
  if (f.empty() || f == "." || f == "..")
    throw ValidationError("dot file name must be nonempty");
  for (char ch : f)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' &&
        ch != '_' && ch != '-')
      throw ValidationError("dot file name may use [A-Za-z0-9._-] only");
  return f;
}

void validate_command(const Scenario& sc, const Json& c) {
  if (!c.is_object() || !c.contains("command") || !c["command"].is_string())
    throw ValidationError("each command needs a string 'command' field");
  const std::string cmd = c["command"].get<std::string>();
  if (cmd == "daseinize") {
    named(sc.projections, c.at("projection").get<std::string>(), "projection");
    flavor_of(c);
  } else if (cmd == "assign") {
    named(sc.states, c.at("state").get<std::string>(), "state");
    named(sc.projections, c.at("projection").get<std::string>(), "projection");
    r_of(c);
    flavor_of(c);
  } else if (cmd == "translate") {
    named(sc.projections, c.at("projection").get<std::string>(), "projection");
    if (c.contains("state")) {
      named(sc.states, c.at("state").get<std::string>(), "state");
      r_of(c);
    }
  } else if (cmd == "verify") {
    theorem_of(c);
  } else if (cmd == "ks-check") {
    if (c.contains("rays")) {
      if (!c["rays"].is_array() || c["rays"].empty())
        throw ValidationError("ks-check rays must be a nonempty array");
      if (!c.contains("dim") || !c["dim"].is_number_integer())
        throw ValidationError("ks-check with rays needs an integer dim");
    } else {
      const std::string fx = c.at("fixture").get<std::string>();
      if (fx != "peres33" && fx != "cabello18" && fx != "self")
        throw ValidationError("ks-check fixture must name peres33, cabello18 or self");
    }
  } else if (cmd == "dot") {
    dot_file_of(c);
    if (c.contains("state")) {
      named(sc.states, c.at("state").get<std::string>(), "state");
      named(sc.projections, c.at("projection").get<std::string>(), "projection");
      r_of(c);
      flavor_of(c);
    }
  } else {
    throw ValidationError("unknown command: " + cmd);
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("scenario JSON: ") + ex.what());
  }
  try {
    if (!doc.is_object())
      throw ValidationError("scenario root must be an object");
    Scenario sc;
    sc.name = doc.value("name", name);
    if (!doc.contains("dimension") || !doc["dimension"].is_number_integer())
      throw ValidationError("scenario needs an integer dimension");
    sc.dimension = doc["dimension"].get<int>();
    if (sc.dimension < 1 || sc.dimension > linops::kMaxDim)
      throw ValidationError("dimension out of range");

    const Json obs = doc.value("observables", Json::object());
    for (const auto& [k, v] : obs.items())
      sc.observables.push_back({k, parse_matrix(v, sc.dimension)});
    const Json seeds = doc.value("seed_contexts", Json::object());
    for (const auto& [k, v] : seeds.items()) {
      contexts::SeedContext s;
      s.name = k;
      if (!v.is_array() || v.empty())
        throw ValidationError("seed context must list generator matrices");
      for (const Json& g : v) s.gens.push_back(parse_matrix(g, sc.dimension));
      sc.seeds.push_back(std::move(s));
    }
    const Json states = doc.value("states", Json::object());
    for (const auto& [k, v] : states.items())
      sc.states.emplace_back(k, parse_state(v, sc.dimension));
    const Json projs = doc.value("projections", Json::object());
    for (const auto& [k, v] : projs.items()) {
      Mat p = parse_matrix(v, sc.dimension);
      try {
        linops::validate_projection(p, 1e-8);
      } catch (const InvalidInput& ex) {
        throw ValidationError(std::string("projection ") + k + ": " + ex.what());
      }
      sc.projections.emplace_back(k, std::move(p));
    }
    if (doc.contains("r_values")) {
      if (!doc["r_values"].is_array())
        throw ValidationError("r_values must be an array");
      for (const Json& r : doc["r_values"]) {
        if (!r.is_number()) throw ValidationError("r_values must be numbers");
        const double x = r.get<double>();
        if (!(x >= 0.0 && x <= 1.0))
          throw ValidationError("r_values must lie in [0, 1]");
        sc.r_values.push_back(x);
      }
    }

    const Json opts = doc.value("options", Json::object());
    sc.options.eps = opts.value("epsilon", kDefaultEps);
    if (!(sc.options.eps > 0.0 && sc.options.eps < 1e-2))
      throw ValidationError("epsilon out of range");
    sc.options.max_contexts = opts.value("max_contexts", 64);
    if (sc.options.max_contexts < 1)
      throw ValidationError("max_contexts must be positive");
    sc.options.seed = opts.value("seed", uint64_t{12345});
    sc.guard = opts.value("guard", static_cast<long long>(2000000));
    if (sc.guard < 1) throw ValidationError("guard must be positive");

    sc.commands = doc.value("commands", Json::array());
    if (!sc.commands.is_array())
      throw ValidationError("commands must be an array");
    for (const Json& c : sc.commands) validate_command(sc, c);
    return sc;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("scenario schema: ") + ex.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  const size_t slash = stem.find_last_of("/\\");
  if (slash != std::string::npos) stem = stem.substr(slash + 1);
  const size_t dot = stem.rfind('.');
  if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
  return parse_scenario(buf.str(), stem);
}

namespace {

struct Env {
  const Scenario& sc;
  contexts::ContextPoset w;
  spectral::SpectralData sd;
};

Json labels_json(const contexts::ContextPoset& w, const IdSet& s) {
  Json out = Json::array();
  for (int v : s.members()) out.push_back(w.ctxs[v].label);
  return out;
}

Json mask_bits(const spectral::SpectralData& sd, int lattice_ctx,
               spectral::Mask m) {
  Json out = Json::array();
  for (int i = 0; i < sd.n_min(lattice_ctx); ++i)
    if (m & (spectral::Mask{1} << i)) out.push_back(i);
  return out;
}

Json stages_json(const Env& e, const spectral::DBSubobject& a) {
  Json out = Json::object();
  for (int v = 0; v < e.w.size(); ++v) {
    const int lat = a.flavor == Flavor::Sheaf ? e.w.flat(v) : v;
    out[e.w.ctxs[v].label] = mask_bits(e.sd, lat, a.top[v]);
  }
  return out;
}

Json truth_value_json(const Env& e, const presheaves::TruthValue& tv) {
  Json out = Json::object();
  out["downset"] = labels_json(e.w, tv.down);
  Json sieves = Json::object();
  for (int v = 0; v < e.w.size(); ++v)
    sieves[e.w.ctxs[v].label] = labels_json(e.w, tv.at(v).members);
  out["sieves"] = sieves;
  return out;
}

Json poset_json(const contexts::ContextPoset& w) {
  Json out = Json::object();
  Json ctxs = Json::array();
  for (int v = 0; v < w.size(); ++v)
    ctxs.push_back(Json{{"label", w.ctxs[v].label},
                        {"n_min", w.ctxs[v].n_min()},
                        {"flat", w.ctxs[w.flat(v)].label}});
  out["contexts"] = ctxs;
  out["bottom"] = w.ctxs[w.bottom()].label;
  Json covers = Json::array();
  for (const auto& [lo, hi] : w.cover_pairs())
    covers.push_back(Json::array({w.ctxs[lo].label, w.ctxs[hi].label}));
  out["covers"] = covers;
  return out;
}

Json report_json(const translate::Report& r) {
  Json out = Json::object();
  out["title"] = r.title;
  out["pass"] = r.pass;
  Json cl = Json::array();
  for (const translate::Clause& c : r.clauses) {
    Json jc = Json::object();
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    if (!c.detail.empty()) jc["detail"] = c.detail;
    cl.push_back(jc);
  }
  out["clauses"] = cl;
  Json cnt = Json::object();
  for (const auto& [k, v] : r.counts) cnt[k] = v;
  out["counts"] = cnt;
  return out;
}

Json run_daseinize(const Env& e, const Json& c) {
  const std::string pname = c.at("projection").get<std::string>();
  const Flavor fl = flavor_of(c);
  spectral::DBSubobject a =
      spectral::proposition_of(e.sd, named(e.sc.projections, pname, "projection"), fl);
  Json out = Json::object();
  out["command"] = "daseinize";
  out["projection"] = pname;
  out["flavor"] = fl == Flavor::Sheaf ? "sheaf" : "presheaf";
  out["stages"] = stages_json(e, a);
  return out;
}

Json run_assign(const Env& e, const Json& c) {
  const std::string sname = c.at("state").get<std::string>();
  const std::string pname = c.at("projection").get<std::string>();
  const double r = r_of(c);
  const Flavor fl = flavor_of(c);
  truth::TruthObject t = truth::truth_rho_r(
      e.sd, named(e.sc.states, sname, "state"), r, fl, e.sd.eps);
  spectral::DBSubobject prop =
      spectral::proposition_of(e.sd, named(e.sc.projections, pname, "projection"), fl);
  presheaves::TruthValue tv = truth::nu(e.sd, prop, t);
  Json out = Json::object();
  out["command"] = "assign";
  out["state"] = sname;
  out["r"] = r;
  out["projection"] = pname;
  out["flavor"] = fl == Flavor::Sheaf ? "sheaf" : "presheaf";
  out["truth_value"] = truth_value_json(e, tv);
  out["closed"] = tv.omega_j_valued();
  return out;
}

Json run_translate(const Env& e, const Json& c) {
  const std::string pname = c.at("projection").get<std::string>();
  const Mat& p_hat = named(e.sc.projections, pname, "projection");
  Json out = Json::object();
  out["command"] = "translate";
  out["projection"] = pname;
  if (c.contains("state")) {
    const std::string sname = c.at("state").get<std::string>();
    const Mat& rho = named(e.sc.states, sname, "state");
    const double r = r_of(c);
    truth::TruthObject t =
        truth::truth_rho_r(e.sd, rho, r, Flavor::Presheaf, e.sd.eps);
    truth::TruthObject t_j =
        truth::truth_rho_r(e.sd, rho, r, Flavor::Sheaf, e.sd.eps);
    spectral::DBSubobject p =
        spectral::proposition_of(e.sd, p_hat, Flavor::Presheaf);
    spectral::DBSubobject p_j =
        spectral::proposition_of(e.sd, p_hat, Flavor::Sheaf);
    presheaves::TruthValue nu = truth::nu(e.sd, p, t);
    presheaves::TruthValue nu_j = truth::nu(e.sd, p_j, t_j);
    out["state"] = sname;
    out["r"] = r;
    out["value"] = truth_value_json(e, nu);
    out["value_closed"] = truth_value_json(e, nu_j);
    out["translation"] = translate::is_translation_tv(e.w, nu, nu_j);
    out["gamma_max"] =
        labels_json(e.w, translate::gamma_max(e.w, nu_j).down);
    out["gamma_min"] =
        labels_json(e.w, translate::gamma_min(e.w, nu_j).down);
  } else {
    spectral::DBSubobject p =
        spectral::proposition_of(e.sd, p_hat, Flavor::Presheaf);
    spectral::DBSubobject p_j =
        spectral::proposition_of(e.sd, p_hat, Flavor::Sheaf);
    spectral::DBSubobject hi = translate::iota_max(e.sd, p_j);
    spectral::DBSubobject lo = translate::iota_min(e.sd, p_j);
    out["translation"] = translate::is_translation_prop(e.sd, p, p_j);
    out["stages"] = stages_json(e, p);
    out["stages_closed"] = stages_json(e, p_j);
    out["iota_max"] = stages_json(e, hi);
    out["iota_min"] = stages_json(e, lo);
    bool inside = true;
    for (int v = 0; v < e.w.size(); ++v)
      if ((lo.top[v] & ~p.top[v]) || (p.top[v] & ~hi.top[v])) inside = false;
    out["in_interval"] = inside;
  }
  return out;
}

std::vector<truth::TruthPresheafM> theorem3_samples(const Env& e,
                                                    int* skipped) {
  std::vector<truth::TruthPresheafM> out;
  for (const auto& [name, rho] : e.sc.states) {
    (void)name;
    for (double r : e.sc.r_values) {
      try {
        out.push_back(truth::materialize_truth(
            e.sd, truth::truth_rho_r(e.sd, rho, r, Flavor::Sheaf, e.sd.eps),
            e.sc.guard));
      } catch (const NotFilter&) {
        ++*skipped;
      }
    }
  }
  for (const truth::LocalDB& g : truth::enumerate_local_db(
           e.sd, Flavor::Sheaf, truth::kGlobal, e.sc.guard)) {
    spectral::DBSubobject p;
    p.flavor = Flavor::Sheaf;
    p.top = g.top;
    out.push_back(truth::principal_truth(e.sd, p));
  }
  return out;
}

Json run_verify(const Env& e, const Json& c, bool* pass) {
  const std::string which = theorem_of(c);
  Json out = Json::object();
  out["command"] = "verify";
  out["theorem"] = which;
  Json reports = Json::array();
  bool all = true;
  if (which == "1" || which == "all") {
    translate::Report r =
        translate::verify_truth_value_classes(e.w, Exec::Serial, e.sc.guard);
    reports.push_back(report_json(r));
    all = all && r.pass;
  }
  if (which == "2" || which == "all") {
    translate::Report r =
        translate::verify_proposition_classes(e.sd, Exec::Serial, e.sc.guard);
    reports.push_back(report_json(r));
    all = all && r.pass;
  }
  if (which == "3" || which == "all") {
    int skipped = 0;
    std::vector<truth::TruthPresheafM> samples = theorem3_samples(e, &skipped);
    translate::Report r = translate::verify_truth_object_classes(
        e.sd, samples, Exec::Serial, e.sc.guard);
    Json jr = report_json(r);
    jr["skipped_not_filter"] = skipped;
    reports.push_back(jr);
    all = all && r.pass;
  }
  out["reports"] = reports;
  out["pass"] = all;
  *pass = all;
  return out;
}

Json run_ks(const Env& e, const Json& c) {
  ks::KSOptions opts;
  opts.eps = e.sc.options.eps;
  opts.max_contexts = std::max(512, e.sc.options.max_contexts);
  opts.guard = e.sc.guard;
  opts.seed = e.sc.options.seed;
  ks::KSResult res;
  if (c.contains("rays")) {
    std::vector<ks::Ray> rays;
    for (const Json& jr : c["rays"]) {
      if (!jr.is_array()) throw ValidationError("each ray must be an array");
      ks::Ray ray;
      for (const Json& x : jr) {
        if (!x.is_number()) throw ValidationError("ray entries must be numbers");
        ray.push_back(x.get<double>());
      }
      rays.push_back(std::move(ray));
    }
    res = ks::ks_check_rays("custom", rays, c.at("dim").get<int>(), opts);
  } else {
    const std::string fx = c.at("fixture").get<std::string>();
    if (fx == "peres33")
      res = ks::ks_check_rays(fx, ks::peres33_rays(), 3, opts);
    else if (fx == "cabello18")
      res = ks::ks_check_rays(fx, ks::cabello18_rays(), 4, opts);
    else
      res = ks::ks_check_poset("self", e.sd, Exec::Serial, e.sc.guard);
  }
  Json out = Json::object();
  out["command"] = "ks-check";
  out["name"] = res.name;
  out["dim"] = res.dim;
  out["rays"] = res.n_rays;
  out["bases"] = res.n_bases;
  out["cliques"] = res.n_cliques;
  out["contexts"] = res.n_contexts;
  out["sections"] = res.sections;
  return out;
}

Json run_dot(const Env& e, const Json& c,
             std::vector<std::pair<std::string, std::string>>* dots) {
  const std::string file = dot_file_of(c);
  presheaves::TruthValue tv;
  const presheaves::TruthValue* color = nullptr;
  if (c.contains("state")) {
    const Mat& rho = named(e.sc.states, c.at("state").get<std::string>(), "state");
    const Mat& p =
        named(e.sc.projections, c.at("projection").get<std::string>(), "projection");
    const Flavor fl = flavor_of(c);
    tv = truth::nu(e.sd, spectral::proposition_of(e.sd, p, fl),
                   truth::truth_rho_r(e.sd, rho, r_of(c), fl, e.sd.eps));
    color = &tv;
  }
  dots->emplace_back(file, export_dot(e.w, color));
  int dashed = 0;
  for (int v = 0; v < e.w.size(); ++v)
    if (e.w.flat(v) != v) ++dashed;
  Json out = Json::object();
  out["command"] = "dot";
  out["file"] = file;
  out["nodes"] = e.w.size();
  out["solid_edges"] = static_cast<int>(e.w.cover_pairs().size());
  out["dashed_edges"] = dashed;
  return out;
}

}  // namespace

std::string export_dot(const contexts::ContextPoset& w,
                       const presheaves::TruthValue* color) {
  std::ostringstream os;
  os << "digraph contexts {\n  rankdir=BT;\n  node [shape=ellipse];\n";
  for (int v = 0; v < w.size(); ++v) {
    os << "  \"" << w.ctxs[v].label << "\"";
    if (color != nullptr && color->down.test(v))
      os << " [style=filled, fillcolor=lightblue]";
    os << ";\n";
  }
  for (const auto& [lo, hi] : w.cover_pairs())
    os << "  \"" << w.ctxs[lo].label << "\" -> \"" << w.ctxs[hi].label
       << "\";\n";
  for (int v = 0; v < w.size(); ++v)
    if (w.flat(v) != v)
      os << "  \"" << w.ctxs[v].label << "\" -> \"" << w.ctxs[w.flat(v)].label
         << "\" [style=dashed];\n";
  os << "}\n";
  return os.str();
}

RunResult run_scenario(const Scenario& sc, bool timing) {
  Env e{sc, {}, {}};
  e.w = contexts::build_poset(sc.dimension, sc.observables, sc.seeds, sc.options);
  e.sd = spectral::build_spectral(e.w, sc.options.eps);

  RunResult rr;
  rr.report = Json::object();
  rr.report["scenario"] = sc.name;
  rr.report["dimension"] = sc.dimension;
  rr.report["poset"] = poset_json(e.w);
  Json results = Json::array();
  for (const Json& c : sc.commands) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string cmd = c.at("command").get<std::string>();
    Json res;
    if (cmd == "daseinize") {
      res = run_daseinize(e, c);
    } else if (cmd == "assign") {
      res = run_assign(e, c);
    } else if (cmd == "translate") {
      res = run_translate(e, c);
    } else if (cmd == "verify") {
      bool pass = true;
      res = run_verify(e, c, &pass);
      rr.pass = rr.pass && pass;
    } else if (cmd == "ks-check") {
      res = run_ks(e, c);
    } else if (cmd == "dot") {
      res = run_dot(e, c, &rr.dot_files);
    } else {
      throw ValidationError("unknown command: " + cmd);
    }
    if (timing) {
      const auto t1 = std::chrono::steady_clock::now();
      res["ms"] =
          std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    results.push_back(std::move(res));
  }
  rr.report["results"] = std::move(results);
  rr.report["pass"] = rr.pass;
  return rr;
}

Scenario scenario_of_fixture(const fixtures::Fixture& f) {
  Scenario sc;
  sc.name = f.name;
  sc.dimension = f.dim;
  sc.observables = f.observables;
  sc.seeds = f.seeds;
  sc.options = f.options;
  for (int k = 0; k < f.dim; ++k) {
    Mat rho = Mat::Zero(f.dim, f.dim);
    rho(k, k) = 1;
    sc.states.emplace_back("e" + std::to_string(k), rho);
  }
  Vec plus = Vec::Constant(f.dim, 1.0 / std::sqrt(double(f.dim)));
  sc.states.emplace_back("plus", plus * plus.adjoint());
  Mat p0 = Mat::Zero(f.dim, f.dim);
  p0(0, 0) = 1;
  sc.projections.emplace_back("P0", p0);
  sc.r_values = {0, 0.3, 0.5, 0.9, 1};
  return sc;
}

}  // namespace qtopos::scenario
