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

#include "qtopos/truth.hpp"

#include <algorithm>

namespace qtopos::truth {

using contexts::ContextPoset;
using linops::Mat;
using linops::Vec;
using presheaves::Sieve;
using presheaves::TruthValue;
using spectral::DBSubobject;

IdSet local_domain(const SpectralData& sd, int at) {
  const ContextPoset& w = *sd.W;
  if (at == kGlobal) return IdSet::full(w.size());
  if (at < 0 || at >= w.size()) throw InvalidInput("stage id out of range");
  return w.below(at);
}

namespace {

int stage_ctx(const SpectralData& sd, Flavor flavor, int v) {
  return flavor == Flavor::Sheaf ? sd.W->flat(v) : v;
}

Mask full_mask(const SpectralData& sd, Flavor flavor, int v) {
  return static_cast<Mask>((1u << sd.n_min(stage_ctx(sd, flavor, v))) - 1u);
}

void check_shape(const SpectralData& sd, const LocalDB& a) {
  if (a.top.size() != static_cast<size_t>(sd.W->size()))
    throw InvalidInput("local has wrong number of stages");
  IdSet dom = local_domain(sd, a.at);
  for (int v = 0; v < sd.W->size(); ++v) {
    if (!dom.test(v)) {
      if (a.top[v] != 0) throw InvalidInput("local has mass outside its domain");
      continue;
    }
    if (a.top[v] > full_mask(sd, a.flavor, v))
      throw InvalidInput("mask exceeds the stage lattice");
  }
}

}  // namespace

bool local_db_valid(const SpectralData& sd, const LocalDB& a) {
  const ContextPoset& w = *sd.W;
  check_shape(sd, a);
  IdSet dom = local_domain(sd, a.at);
  for (int v : dom.members()) {
    if (a.flavor == Flavor::Sheaf && a.top[v] != a.top[w.flat(v)]) return false;
    for (int u : w.below(v).members()) {
      if (!dom.test(u)) return false;  // domain must be down-closed
      int sv = stage_ctx(sd, a.flavor, v);
      int su = stage_ctx(sd, a.flavor, u);
      Mask img = sd.restrict_mask(sv, su, a.top[v]);
      if ((img | a.top[u]) != a.top[u]) return false;
    }
  }
  return true;
}

LocalDB restrict_local(const SpectralData& sd, const LocalDB& a, int u) {
  IdSet dom = local_domain(sd, a.at);
  if (!dom.test(u)) throw InvalidInput("restriction target outside the domain");
  LocalDB out;
  out.flavor = a.flavor;
  out.at = u;
  out.top.assign(a.top.size(), 0);
  for (int x : sd.W->below(u).members()) out.top[x] = a.top[x];
  return out;
}

bool local_leq(const SpectralData& sd, const LocalDB& a, const LocalDB& b) {
  if (a.flavor != b.flavor || a.at != b.at)
    throw InvalidInput("locals live at different stages");
  for (int v : local_domain(sd, a.at).members())
    if ((a.top[v] | b.top[v]) != b.top[v]) return false;
  return true;
}

LocalDB local_meet(const SpectralData& sd, const LocalDB& a, const LocalDB& b) {
  if (a.flavor != b.flavor || a.at != b.at)
    throw InvalidInput("locals live at different stages");
  LocalDB out = a;
  for (size_t v = 0; v < out.top.size(); ++v) out.top[v] &= b.top[v];
  if (!local_db_valid(sd, out)) throw ValidationError("meet left the lattice");
  return out;
}

LocalDB local_join(const SpectralData& sd, const LocalDB& a, const LocalDB& b) {
  if (a.flavor != b.flavor || a.at != b.at)
    throw InvalidInput("locals live at different stages");
  LocalDB out = a;
  for (size_t v = 0; v < out.top.size(); ++v) out.top[v] |= b.top[v];
  if (!local_db_valid(sd, out)) throw ValidationError("join left the lattice");
  return out;
}

LocalDB local_top(const SpectralData& sd, Flavor flavor, int at) {
  LocalDB out;
  out.flavor = flavor;
  out.at = at;
  out.top.assign(sd.W->size(), 0);
  for (int v : local_domain(sd, at).members())
    out.top[v] = full_mask(sd, flavor, v);
  return out;
}

std::vector<LocalDB> enumerate_local_db(const SpectralData& sd, Flavor flavor,
                                        int at, long long guard) {
  const ContextPoset& w = *sd.W;
  IdSet dom = local_domain(sd, at);
  // Sheaf-flavor locals are determined by their flat-fixed stages.
  std::vector<int> order;
  for (int v : w.descending())
    if (dom.test(v) && (flavor == Flavor::Presheaf || w.is_flat_fixed(v)))
      order.push_back(v);

  std::vector<LocalDB> out;
  LocalDB cur;
  cur.flavor = flavor;
  cur.at = at;
  cur.top.assign(w.size(), 0);
  long long nodes = 0;

  std::function<void(size_t)> rec = [&](size_t k) {
    if (++nodes > guard) throw SizeLimit("local enumeration guard exceeded");
    if (k == order.size()) {
      LocalDB done = cur;
      if (flavor == Flavor::Sheaf)
        for (int v : dom.members()) done.top[v] = cur.top[w.flat(v)];
      out.push_back(std::move(done));
      if (static_cast<long long>(out.size()) > guard)
        throw SizeLimit("local enumeration guard exceeded");
      return;
    }
    int v = order[k];
    Mask fm = full_mask(sd, flavor, v);
    for (Mask m = 0; m <= fm; ++m) {
      bool ok = true;
      // Constraints from already-chosen supersets.
      for (size_t i = 0; i < k && ok; ++i) {
        int s = order[i];
        if (!w.leq(v, s)) continue;
        Mask img = sd.restrict_mask(stage_ctx(sd, flavor, s),
                                    stage_ctx(sd, flavor, v), cur.top[s]);
        ok = (img | m) == m;
      }
      if (!ok) continue;
      cur.top[v] = m;
      rec(k + 1);
    }
    cur.top[v] = 0;
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

TruthObject truth_rho_r(const SpectralData& sd, const Mat& rho, double r,
                        Flavor flavor, double eps) {
  linops::validate_density(rho);
  if (r < -eps || r > 1 + eps) throw InvalidInput("threshold outside [0, 1]");
  const SpectralData* sp = &sd;
  Mat rho_c = rho;
  TruthObject t;
  t.flavor = flavor;
  t.tag = "state-threshold";
  t.member = [sp, rho_c, r, flavor, eps](const LocalDB& a) {
    if (a.flavor != flavor) throw InvalidInput("flavor mismatch");
    for (int v : local_domain(*sp, a.at).members()) {
      int sv = flavor == Flavor::Sheaf ? sp->W->flat(v) : v;
      Mat p = sp->proj_of_mask(sv, a.top[v]);
      double tr = (rho_c * p).trace().real();
      if (tr < r - eps) return false;
    }
    return true;
  };
  return t;
}

TruthObject truth_vector(const SpectralData& sd, const Vec& phi, Flavor flavor,
                         double eps) {
  if (phi.size() != sd.W->dim) throw InvalidInput("vector has wrong dimension");
  if (std::abs(phi.norm() - 1.0) > 1e-8)
    throw InvalidInput("vector is not normalized");
  const SpectralData* sp = &sd;
  Mat pr = phi * phi.adjoint();
  TruthObject t;
  t.flavor = flavor;
  t.tag = "vector-support";
  t.member = [sp, pr, flavor, eps](const LocalDB& a) {
    if (a.flavor != flavor) throw InvalidInput("flavor mismatch");
    for (int v : local_domain(*sp, a.at).members()) {
      int sv = flavor == Flavor::Sheaf ? sp->W->flat(v) : v;
      Mat p = sp->proj_of_mask(sv, a.top[v]);
      if (!linops::loewner_leq(pr, p, std::max(eps, 1e-8))) return false;
    }
    return true;
  };
  return t;
}

Sieve tau(const SpectralData& sd, const TruthObject& t, const LocalDB& s) {
  const ContextPoset& w = *sd.W;
  if (t.flavor != s.flavor) throw InvalidInput("flavor mismatch");
  Sieve sv;
  sv.at = s.at;
  sv.members = IdSet(w.size());
  for (int u : local_domain(sd, s.at).members())
    if (t.member(restrict_local(sd, s, u))) sv.members.set(u);
  if (!presheaves::is_sieve(w, sv))
    throw NotFilter("truth object stages are not restriction-consistent");
  if (t.flavor == Flavor::Sheaf && !presheaves::sieve_j_closed(w, sv))
    throw NotFilter("sheaf-flavor truth object gave a non-closed sieve");
  return sv;
}

std::function<Sieve(const LocalDB&)> tau_char(const SpectralData& sd,
                                              const TruthObject& t) {
  const SpectralData* sp = &sd;
  TruthObject tc = t;
  return [sp, tc](const LocalDB& s) { return tau(*sp, tc, s); };
}

namespace {

LocalDB global_of_db(const SpectralData& sd, const DBSubobject& p) {
  LocalDB g;
  g.flavor = p.flavor;
  g.at = kGlobal;
  g.top = p.top;
  if (!local_db_valid(sd, g)) throw InvalidInput("proposition stages invalid");
  return g;
}

TruthValue tv_from_member_set(const SpectralData& sd, const IdSet& in,
                              Flavor flavor) {
  const ContextPoset& w = *sd.W;
  for (int v : in.members())
    for (int u : w.below(v).members())
      if (!in.test(u)) throw NotFilter("truth value is not down-closed");
  TruthValue tv = presheaves::truth_value_from_downset(w, in);
  if (flavor == Flavor::Sheaf && !tv.omega_j_valued())
    throw NotFilter("sheaf-flavor truth value escapes the closed classifier");
  return tv;
}

}  // namespace

TruthValue nu(const SpectralData& sd, const DBSubobject& p,
              const TruthObject& t) {
  if (p.flavor != t.flavor) throw InvalidInput("flavor mismatch");
  const ContextPoset& w = *sd.W;
  LocalDB g = global_of_db(sd, p);
  IdSet in(w.size());
  for (int v = 0; v < w.size(); ++v)
    if (t.member(restrict_local(sd, g, v))) in.set(v);
  return tv_from_member_set(sd, in, t.flavor);
}

TruthValue nu_projection_fast(const SpectralData& sd, const Mat& p_hat,
                              const Mat& rho, double r, Flavor flavor,
                              double eps) {
  linops::validate_projection(p_hat);
  linops::validate_density(rho);
  const ContextPoset& w = *sd.W;
  IdSet in(w.size());
  for (int v = 0; v < w.size(); ++v) {
    Mat d = flavor == Flavor::Sheaf ? spectral::daseinize_j(sd, p_hat, v)
                                    : spectral::daseinize(sd, p_hat, v);
    if ((rho * d).trace().real() >= r - eps) in.set(v);
  }
  return tv_from_member_set(sd, in, flavor);
}

TruthValue nu_vector_fast(const SpectralData& sd, const Mat& p_hat,
                          const Vec& phi, Flavor flavor, double eps) {
  linops::validate_projection(p_hat);
  const ContextPoset& w = *sd.W;
  Mat pr = phi * phi.adjoint();
  IdSet in(w.size());
  for (int v = 0; v < w.size(); ++v) {
    Mat d = flavor == Flavor::Sheaf ? spectral::daseinize_j(sd, p_hat, v)
                                    : spectral::daseinize(sd, p_hat, v);
    if (linops::loewner_leq(pr, d, std::max(eps, 1e-8))) in.set(v);
  }
  return tv_from_member_set(sd, in, flavor);
}

std::vector<LocalDB> materialize_stage(const SpectralData& sd,
                                       const TruthObject& t, int at,
                                       long long guard) {
  std::vector<LocalDB> out;
  for (const LocalDB& a : enumerate_local_db(sd, t.flavor, at, guard))
    if (t.member(a)) out.push_back(a);
  return out;
}

bool stage_upward_closed(const SpectralData& sd, const TruthObject& t, int at,
                         long long guard) {
  std::vector<LocalDB> all = enumerate_local_db(sd, t.flavor, at, guard);
  for (const LocalDB& a : all) {
    if (!t.member(a)) continue;
    for (const LocalDB& b : all)
      if (local_leq(sd, a, b) && !t.member(b)) return false;
  }
  return true;
}

bool stage_is_filter(const SpectralData& sd, const TruthObject& t, int at,
                     long long guard) {
  if (!stage_upward_closed(sd, t, at, guard)) return false;
  std::vector<LocalDB> in = materialize_stage(sd, t, at, guard);
  for (size_t i = 0; i < in.size(); ++i)
    for (size_t j = i; j < in.size(); ++j)
      if (!t.member(local_meet(sd, in[i], in[j]))) return false;
  return true;
}

bool truth_is_presheaf(const SpectralData& sd, const TruthObject& t,
                       long long guard) {
  const ContextPoset& w = *sd.W;
  for (int v = 0; v < w.size(); ++v)
    for (const LocalDB& a : materialize_stage(sd, t, v, guard))
      for (int u : w.below(v).members())
        if (!t.member(restrict_local(sd, a, u))) return false;
  return true;
}

bool truth_is_sheaf(const SpectralData& sd, const TruthObject& t,
                    long long guard) {
  if (t.flavor != Flavor::Sheaf) return false;
  if (!truth_is_presheaf(sd, t, guard)) return false;
  const ContextPoset& w = *sd.W;
  for (int v = 0; v < w.size(); ++v) {
    int f = w.flat(v);
    std::vector<LocalDB> image;
    for (const LocalDB& a : materialize_stage(sd, t, v, guard))
      image.push_back(restrict_local(sd, a, f));
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    std::vector<LocalDB> flat_stage = materialize_stage(sd, t, f, guard);
    if (image.size() != flat_stage.size()) return false;
    for (size_t i = 0; i < image.size(); ++i)
      if (!(image[i] == flat_stage[i])) return false;
  }
  return true;
}

TruthPresheafM materialize_truth(const SpectralData& sd, const TruthObject& t,
                                 long long guard) {
  const ContextPoset& w = *sd.W;
  TruthPresheafM m;
  m.flavor = t.flavor;
  m.gen.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    std::vector<LocalDB> stage = materialize_stage(sd, t, v, guard);
    if (stage.empty()) continue;
    LocalDB g = stage[0];
    for (size_t i = 1; i < stage.size(); ++i) g = local_meet(sd, g, stage[i]);
    if (!t.member(g)) throw NotFilter("stage is not meet-closed");
    for (const LocalDB& a : stage)
      if (!local_leq(sd, g, a))
        throw NotFilter("stage is not a principal filter");
    size_t above = 0;
    for (const LocalDB& a : enumerate_local_db(sd, t.flavor, v, guard))
      if (local_leq(sd, g, a)) ++above;
    if (above != stage.size()) throw NotFilter("stage is not upward-closed");
    m.gen[v] = g;
  }
  return m;
}

TruthObject as_truth_object(const SpectralData& sd, const TruthPresheafM& m,
                            const std::string& tag) {
  const SpectralData* sp = &sd;
  TruthPresheafM mc = m;
  TruthObject t;
  t.flavor = m.flavor;
  t.tag = tag;
  t.member = [sp, mc](const LocalDB& a) { return mc.member(*sp, a); };
  return t;
}

bool truth_m_valid(const SpectralData& sd, const TruthPresheafM& m) {
  const ContextPoset& w = *sd.W;
  if (m.gen.size() != static_cast<size_t>(w.size())) return false;
  for (int v = 0; v < w.size(); ++v) {
    if (!m.gen[v].has_value()) continue;
    const LocalDB& g = *m.gen[v];
    if (g.at != v || g.flavor != m.flavor || !local_db_valid(sd, g))
      return false;
    for (int u : w.below(v).members()) {
      if (!m.gen[u].has_value()) return false;
      if (!local_leq(sd, *m.gen[u], restrict_local(sd, g, u))) return false;
    }
    if (m.flavor == Flavor::Sheaf) {
      int f = w.flat(v);
      if (!m.gen[f].has_value()) return false;
      if (!(restrict_local(sd, g, f) == *m.gen[f])) return false;
    }
  }
  if (m.flavor == Flavor::Sheaf)
    for (int v = 0; v < w.size(); ++v)
      if (m.gen[v].has_value() != m.gen[w.flat(v)].has_value()) return false;
  return true;
}

TruthPresheafM principal_truth(const SpectralData& sd,
                               const spectral::DBSubobject& p) {
  const ContextPoset& w = *sd.W;
  LocalDB g;
  g.flavor = p.flavor;
  g.at = kGlobal;
  g.top = p.top;
  if (!local_db_valid(sd, g)) throw InvalidInput("invalid subobject");
  TruthPresheafM m;
  m.flavor = p.flavor;
  m.gen.resize(w.size());
  for (int v = 0; v < w.size(); ++v) m.gen[v] = restrict_local(sd, g, v);
  return m;
}

std::vector<TruthPresheafM> enumerate_truth_presheaves(const SpectralData& sd,
                                                       Flavor flavor,
                                                       long long guard) {
  const ContextPoset& w = *sd.W;
  std::vector<int> order;
  for (int v : w.descending())
    if (flavor == Flavor::Presheaf || w.is_flat_fixed(v)) order.push_back(v);

  std::vector<std::vector<LocalDB>> locals(w.size());
  for (int v : order) locals[v] = enumerate_local_db(sd, flavor, v, guard);

  std::vector<TruthPresheafM> out;
  TruthPresheafM cur;
  cur.flavor = flavor;
  cur.gen.resize(w.size());
  long long nodes = 0;

  std::function<void(size_t)> rec = [&](size_t k) {
    if (++nodes > guard) throw SizeLimit("truth enumeration guard exceeded");
    if (k == order.size()) {
      TruthPresheafM done = cur;
      if (flavor == Flavor::Sheaf) {
        for (int v = 0; v < w.size(); ++v) {
          if (w.is_flat_fixed(v)) continue;
          int f = w.flat(v);
          if (!cur.gen[f].has_value()) continue;
          LocalDB g;
          g.flavor = flavor;
          g.at = v;
          g.top.assign(w.size(), 0);
          for (int x : w.below(v).members()) g.top[x] = cur.gen[f]->top[w.flat(x)];
          done.gen[v] = g;
        }
      }
      out.push_back(std::move(done));
      if (static_cast<long long>(out.size()) > guard)
        throw SizeLimit("truth enumeration guard exceeded");
      return;
    }
    int v = order[k];
    bool have_upper = false;
    LocalDB upper;
    for (size_t i = 0; i < k; ++i) {
      int s = order[i];
      if (!w.leq(v, s)) continue;
      if (!cur.gen[s].has_value()) continue;
      LocalDB r = restrict_local(sd, *cur.gen[s], v);
      if (!have_upper) {
        upper = r;
        have_upper = true;
      } else {
        upper = local_meet(sd, upper, r);
      }
    }
    if (!have_upper) {
      cur.gen[v].reset();
      rec(k + 1);
    }
    for (const LocalDB& g : locals[v]) {
      if (have_upper && !local_leq(sd, g, upper)) continue;
      cur.gen[v] = g;
      rec(k + 1);
    }
    cur.gen[v].reset();
  };
  rec(0);
  return out;
}

}  // namespace qtopos::truth
