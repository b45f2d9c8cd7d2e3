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

#include "qtopos/translate.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qtopos::translate {

using contexts::ContextPoset;
using spectral::Mask;

// --- truth values ---

TruthValue flat_preimage_tv(const ContextPoset& w, const TruthValue& tv) {
  IdSet down(w.size());
  for (int v = 0; v < w.size(); ++v)
    if (tv.down.test(w.flat(v))) down.set(v);
  TruthValue out = presheaves::truth_value_from_downset(w, down);
  if (!out.omega_j_valued())
    throw Error("flat preimage escaped the closed classifier");
  return out;
}

bool is_translation_tv(const ContextPoset& w, const TruthValue& nu,
                       const TruthValue& nu_j) {
  if (!nu_j.omega_j_valued())
    throw InvalidInput("target is not a closed truth value");
  return flat_preimage_tv(w, nu) == nu_j;
}

TruthValue gamma_max(const ContextPoset& w, const TruthValue& nu_j) {
  if (!nu_j.omega_j_valued())
    throw InvalidInput("input is not a closed truth value");
  TruthValue out = presheaves::truth_value_from_downset(w, nu_j.down);
  if (!is_translation_tv(w, out, nu_j))
    throw Error("largest translation failed its defining property");
  return out;
}

TruthValue gamma_min(const ContextPoset& w, const TruthValue& nu_j) {
  if (!nu_j.omega_j_valued())
    throw InvalidInput("input is not a closed truth value");
  IdSet down(w.size());
  for (int v : nu_j.down.members())
    for (int u : w.below(w.flat(v)).members()) down.set(u);
  TruthValue out = presheaves::truth_value_from_downset(w, down);
  if (!is_translation_tv(w, out, nu_j))
    throw Error("smallest translation failed its defining property");
  return out;
}

// --- principal-downset propositions ---

DBSubobject sheaf_image_prop(const SpectralData& sd, const DBSubobject& p) {
  if (p.flavor != Flavor::Presheaf) throw InvalidInput("expected presheaf flavor");
  if (!spectral::is_db(sd, p)) throw InvalidInput("invalid subobject");
  const ContextPoset& w = *sd.W;
  DBSubobject out;
  out.flavor = Flavor::Sheaf;
  out.top.resize(w.size());
  for (int v = 0; v < w.size(); ++v) out.top[v] = p.top[w.flat(v)];
  if (!spectral::is_db(sd, out)) throw Error("flat image left the lattice");
  return out;
}

bool is_translation_prop(const SpectralData& sd, const DBSubobject& p,
                         const DBSubobject& p_j) {
  if (p_j.flavor != Flavor::Sheaf) throw InvalidInput("expected sheaf flavor");
  if (!spectral::is_db(sd, p_j)) throw InvalidInput("invalid subobject");
  return sheaf_image_prop(sd, p).top == p_j.top;
}

DBSubobject iota_max(const SpectralData& sd, const DBSubobject& p_j) {
  if (p_j.flavor != Flavor::Sheaf || !spectral::is_db(sd, p_j))
    throw InvalidInput("expected a valid sheaf-flavor subobject");
  const ContextPoset& w = *sd.W;
  DBSubobject out;
  out.flavor = Flavor::Presheaf;
  out.top.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    // The top at flat(v) also lies in the finer lattice at v.
    linops::Mat t = sd.proj_of_mask(w.flat(v), p_j.top[v]);
    out.top[v] = sd.mask_of_proj(v, t);
  }
  if (!spectral::is_db(sd, out))
    throw Error("largest translation left the lattice");
  if (!is_translation_prop(sd, out, p_j))
    throw Error("largest translation failed its defining property");
  return out;
}

DBSubobject iota_min(const SpectralData& sd, const DBSubobject& p_j) {
  if (p_j.flavor != Flavor::Sheaf || !spectral::is_db(sd, p_j))
    throw InvalidInput("expected a valid sheaf-flavor subobject");
  const ContextPoset& w = *sd.W;
  DBSubobject out;
  out.flavor = Flavor::Presheaf;
  out.top.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    Mask m = 0;
    for (int x : w.u_flat(v).members())
      m |= sd.restrict_mask(w.flat(x), v, p_j.top[x]);
    out.top[v] = m;
  }
  if (!spectral::is_db(sd, out))
    throw Error("smallest translation left the lattice");
  if (!is_translation_prop(sd, out, p_j))
    throw Error("smallest translation failed its defining property");
  return out;
}

std::vector<DBSubobject> enumerate_db_subobjects(const SpectralData& sd,
                                                 Flavor flavor,
                                                 long long guard) {
  std::vector<DBSubobject> out;
  for (const LocalDB& a :
       truth::enumerate_local_db(sd, flavor, truth::kGlobal, guard)) {
    DBSubobject p;
    p.flavor = flavor;
    p.top = a.top;
    out.push_back(std::move(p));
  }
  return out;
}

// --- locals and truth objects ---

LocalDB sheaf_image_local(const SpectralData& sd, const LocalDB& a, int v) {
  if (a.flavor != Flavor::Presheaf)
    throw InvalidInput("expected a presheaf-flavor local");
  const ContextPoset& w = *sd.W;
  IdSet src = truth::local_domain(sd, a.at);
  IdSet dst = truth::local_domain(sd, v);
  LocalDB out;
  out.flavor = Flavor::Sheaf;
  out.at = v;
  out.top.assign(w.size(), 0);
  for (int u : dst.members()) {
    int f = w.flat(u);
    if (!src.test(f)) throw InvalidInput("flat image escapes the local domain");
    out.top[u] = a.top[f];
  }
  return out;
}

presheaves::Subpresheaf varrho_sub(const presheaves::Presheaf& q,
                                   const presheaves::Presheaf& flat_q,
                                   const presheaves::Subpresheaf& s, int v) {
  const ContextPoset& w = *q.W;
  if (s.Q != &q) throw InvalidInput("subobject does not belong to the source");
  if (!flat_q.same_shape(presheaves::sheafify(q)))
    throw InvalidInput("target is not the flat image of the source");
  int f = w.flat(v);
  for (int x = 0; x < w.size(); ++x)
    if (!w.leq(x, f) && !s.elems[x].empty())
      throw InvalidInput("subobject has support outside the flat downset");
  presheaves::Subpresheaf out;
  out.Q = &flat_q;
  out.elems.assign(w.size(), IdSet(0));
  for (int x = 0; x < w.size(); ++x) {
    if (w.leq(x, v))
      out.elems[x] = s.elems[w.flat(x)];
    else
      out.elems[x] = IdSet(flat_q.stage[x]);
  }
  return out;
}

std::function<bool(int, const LocalDB&)> truth_preimage(
    const SpectralData& sd, const TruthObject& t_j) {
  if (t_j.flavor != Flavor::Sheaf) throw InvalidInput("expected sheaf flavor");
  const SpectralData* sp = &sd;
  TruthObject tj = t_j;
  return [sp, tj](int v, const LocalDB& a) {
    if (a.at != sp->W->flat(v))
      throw InvalidInput("local does not live below the flat context");
    return tj.member(sheaf_image_local(*sp, a, v));
  };
}

GeneratedFilter filter_generate(const SpectralData& sd, Flavor flavor, int at,
                                const std::vector<LocalDB>& r) {
  GeneratedFilter out;
  for (const LocalDB& a : r) {
    if (a.flavor != flavor || a.at != at)
      throw InvalidInput("generator lives at the wrong stage");
    if (!truth::local_db_valid(sd, a)) throw InvalidInput("invalid generator");
    out.gen = out.empty ? a : truth::local_meet(sd, out.gen, a);
    out.empty = false;
  }
  return out;
}

namespace {

// Presheaf-flavor locals per stage, shared across translation tests.
struct LocalsCache {
  std::vector<std::vector<LocalDB>> at;
};

LocalsCache make_cache(const SpectralData& sd, long long guard) {
  LocalsCache c;
  c.at.resize(sd.W->size());
  for (int v = 0; v < sd.W->size(); ++v)
    c.at[v] = truth::enumerate_local_db(sd, Flavor::Presheaf, v, guard);
  return c;
}

bool translation_truth_cached(const SpectralData& sd, const TruthPresheafM& t,
                              const TruthPresheafM& t_j,
                              const LocalsCache& cache) {
  const ContextPoset& w = *sd.W;
  for (int v = 0; v < w.size(); ++v) {
    for (const LocalDB& a : cache.at[w.flat(v)]) {
      bool lhs = t.member(sd, a);
      bool rhs = t_j.member(sd, sheaf_image_local(sd, a, v));
      if (lhs != rhs) return false;
    }
  }
  return true;
}

bool is_translation_of_some_cached(const SpectralData& sd,
                                   const TruthPresheafM& t,
                                   const LocalsCache& cache) {
  TruthPresheafM cand = translation_candidate(sd, t);
  return truth::truth_m_valid(sd, cand) &&
         translation_truth_cached(sd, t, cand, cache);
}

}  // namespace

bool is_translation_truth(const SpectralData& sd, const TruthObject& t,
                          const TruthObject& t_j, long long guard) {
  if (t.flavor != Flavor::Presheaf || t_j.flavor != Flavor::Sheaf)
    throw InvalidInput("translation test needs a presheaf/sheaf pair");
  const ContextPoset& w = *sd.W;
  for (int v = 0; v < w.size(); ++v) {
    for (const LocalDB& a :
         truth::enumerate_local_db(sd, Flavor::Presheaf, w.flat(v), guard)) {
      if (t.member(a) != t_j.member(sheaf_image_local(sd, a, v))) return false;
    }
  }
  return true;
}

bool is_translation_truth_m(const SpectralData& sd, const TruthPresheafM& t,
                            const TruthPresheafM& t_j, long long guard) {
  if (t.flavor != Flavor::Presheaf || t_j.flavor != Flavor::Sheaf)
    throw InvalidInput("translation test needs a presheaf/sheaf pair");
  return translation_truth_cached(sd, t, t_j, make_cache(sd, guard));
}

TruthPresheafM jmath_max_m(const SpectralData& sd, const TruthPresheafM& t_j,
                           long long guard) {
  if (t_j.flavor != Flavor::Sheaf) throw InvalidInput("expected sheaf flavor");
  const ContextPoset& w = *sd.W;
  LocalsCache cache = make_cache(sd, guard);
  TruthPresheafM out;
  out.flavor = Flavor::Presheaf;
  out.gen.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    if (!t_j.gen[v].has_value()) continue;
    bool have = false;
    LocalDB g;
    for (const LocalDB& a : cache.at[v]) {
      if (!truth::local_leq(sd, *t_j.gen[v], sheaf_image_local(sd, a, v)))
        continue;
      g = have ? truth::local_meet(sd, g, a) : a;
      have = true;
    }
    if (!have) throw Error("largest translation has an empty stage");
    out.gen[v] = g;
  }
  return out;
}

TruthPresheafM jmath_min_m(const SpectralData& sd, const TruthPresheafM& t_j,
                           long long guard) {
  if (t_j.flavor != Flavor::Sheaf) throw InvalidInput("expected sheaf flavor");
  const ContextPoset& w = *sd.W;
  LocalsCache cache = make_cache(sd, guard);
  // Generator of the preimage stage at each context with a nonempty stage.
  std::vector<std::optional<LocalDB>> pre(w.size());
  for (int x = 0; x < w.size(); ++x) {
    if (!t_j.gen[x].has_value()) continue;
    bool have = false;
    LocalDB g;
    for (const LocalDB& a : cache.at[w.flat(x)]) {
      if (!truth::local_leq(sd, *t_j.gen[x], sheaf_image_local(sd, a, x)))
        continue;
      g = have ? truth::local_meet(sd, g, a) : a;
      have = true;
    }
    if (!have) throw Error("preimage stage is empty");
    pre[x] = g;
  }
  TruthPresheafM out;
  out.flavor = Flavor::Presheaf;
  out.gen.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    bool have = false;
    LocalDB g;
    for (int x : w.u_flat(v).members()) {
      if (!pre[x].has_value()) continue;
      LocalDB r = truth::restrict_local(sd, *pre[x], v);
      g = have ? truth::local_meet(sd, g, r) : r;
      have = true;
    }
    if (have) out.gen[v] = g;
  }
  return out;
}

TruthObject jmath_max(const SpectralData& sd, const TruthObject& t_j,
                      long long guard) {
  (void)guard;
  if (t_j.flavor != Flavor::Sheaf) throw InvalidInput("expected sheaf flavor");
  const SpectralData* sp = &sd;
  TruthObject tj = t_j;
  TruthObject t;
  t.flavor = Flavor::Presheaf;
  t.tag = "jmath-max(" + t_j.tag + ")";
  t.member = [sp, tj](const LocalDB& a) {
    return tj.member(sheaf_image_local(*sp, a, a.at));
  };
  return t;
}

TruthObject jmath_min(const SpectralData& sd, const TruthObject& t_j,
                      long long guard) {
  TruthPresheafM m = jmath_min_m(sd, truth::materialize_truth(sd, t_j, guard),
                                 guard);
  return truth::as_truth_object(sd, m, "jmath-min(" + t_j.tag + ")");
}

TruthPresheafM translation_candidate(const SpectralData& sd,
                                     const TruthPresheafM& t) {
  if (t.flavor != Flavor::Presheaf) throw InvalidInput("expected presheaf flavor");
  const ContextPoset& w = *sd.W;
  TruthPresheafM cand;
  cand.flavor = Flavor::Sheaf;
  cand.gen.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    const auto& g = t.gen[w.flat(v)];
    if (g.has_value()) cand.gen[v] = sheaf_image_local(sd, *g, v);
  }
  return cand;
}

bool is_translation_of_some(const SpectralData& sd, const TruthPresheafM& t,
                            long long guard) {
  return is_translation_of_some_cached(sd, t, make_cache(sd, guard));
}

// --- cross-checks ---

bool verify_nu_relation(const SpectralData& sd, const DBSubobject& p,
                        const TruthObject& t, const DBSubobject& p_j,
                        const TruthObject& t_j) {
  TruthValue v = truth::nu(sd, p, t);
  TruthValue v_j = truth::nu(sd, p_j, t_j);
  return v_j == flat_preimage_tv(*sd.W, v);
}

bool nu_tau_consistent(const SpectralData& sd, const DBSubobject& p,
                       const TruthObject& t) {
  const ContextPoset& w = *sd.W;
  TruthValue v = truth::nu(sd, p, t);
  LocalDB g;
  g.flavor = p.flavor;
  g.at = truth::kGlobal;
  g.top = p.top;
  for (int x = 0; x < w.size(); ++x) {
    presheaves::Sieve s = truth::tau(sd, t, truth::restrict_local(sd, g, x));
    if (!(s.members == (v.down & w.below(x)))) return false;
  }
  return true;
}

bool diagram_commutes(const SpectralData& sd, const TruthObject& t,
                      const TruthObject& t_j, long long guard) {
  if (t.flavor != Flavor::Presheaf || t_j.flavor != Flavor::Sheaf)
    throw InvalidInput("diagram check needs a presheaf/sheaf pair");
  const ContextPoset& w = *sd.W;
  for (int v = 0; v < w.size(); ++v) {
    int f = w.flat(v);
    for (const LocalDB& a :
         truth::enumerate_local_db(sd, Flavor::Presheaf, f, guard)) {
      for (int u : w.below(f).members()) {
        bool lhs = t.member(truth::restrict_local(sd, a, w.flat(u)));
        bool rhs = t_j.member(
            sheaf_image_local(sd, truth::restrict_local(sd, a, u), u));
        if (lhs != rhs) return false;
      }
    }
  }
  return true;
}

// --- exhaustive verifiers ---

void Report::add(const std::string& name, bool ok, const std::string& detail) {
  clauses.push_back({name, ok, detail});
}

namespace {

std::string size_list(const std::vector<long long>& sizes) {
  std::ostringstream os;
  for (size_t i = 0; i < sizes.size(); ++i)
    os << (i ? "," : "") << sizes[i];
  return os.str();
}

bool finalize(Report& rep) {
  rep.pass = true;
  for (const Clause& c : rep.clauses) rep.pass = rep.pass && c.pass;
  return rep.pass;
}

// Full outer-lattice enumeration is restricted to small posets.
void check_enumeration_gate(const SpectralData& sd) {
  const ContextPoset& w = *sd.W;
  if (w.size() > 6)
    throw SizeLimit("subobject enumeration is limited to 6 contexts");
  for (int v = 0; v < w.size(); ++v)
    if (sd.n_min(v) > 4)
      throw SizeLimit(
          "subobject enumeration is limited to 4 minimal projections");
}

}  // namespace

Report verify_truth_value_classes(const ContextPoset& w, Exec mode,
                                  long long guard) {
  Report rep;
  rep.title = "truth-value-classes";
  std::vector<TruthValue> all = presheaves::gamma_omega(w, guard);
  std::vector<TruthValue> closed = presheaves::gamma_omega_j(w, guard);
  int n = static_cast<int>(all.size());
  int m = static_cast<int>(closed.size());
  rep.counts.push_back({"global_elements", n});
  rep.counts.push_back({"closed_global_elements", m});

  std::map<IdSet, int> closed_idx;
  for (int k = 0; k < m; ++k) closed_idx[closed[k].down] = k;

  std::vector<TruthValue> lo(m, TruthValue{}), hi(m, TruthValue{});
  bool extremes_ok = true;
  for (int k = 0; k < m; ++k) {
    lo[k] = gamma_min(w, closed[k]);
    hi[k] = gamma_max(w, closed[k]);
    extremes_ok = extremes_ok && lo[k].leq(hi[k]);
  }
  rep.add("translation-extremes", extremes_ok);

  std::vector<int> cls(n, -1);
  std::vector<char> agree(n, 0);
  par_for(mode, n, [&](int i) {
    IdSet pre(w.size());
    for (int v = 0; v < w.size(); ++v)
      if (all[i].down.test(w.flat(v))) pre.set(v);
    auto it = closed_idx.find(pre);
    cls[i] = it == closed_idx.end() ? -1 : it->second;
    if (cls[i] >= 0) {
      bool in_interval =
          lo[cls[i]].down.subset_of(all[i].down) && all[i].down.subset_of(hi[cls[i]].down);
      agree[i] = in_interval ? 1 : 0;
      // Membership in any other interval would break disjointness.
      for (int k = 0; k < m && agree[i]; ++k) {
        if (k == cls[i]) continue;
        if (lo[k].down.subset_of(all[i].down) && all[i].down.subset_of(hi[k].down))
          agree[i] = 0;
      }
    }
  });

  bool lands = true, intervals = true;
  std::vector<long long> sizes(m, 0);
  for (int i = 0; i < n; ++i) {
    if (cls[i] < 0) lands = false;
    else {
      sizes[cls[i]]++;
      intervals = intervals && agree[i];
    }
  }
  rep.add("retraction-lands-closed", lands);
  bool nonempty = true;
  for (long long s : sizes) nonempty = nonempty && s > 0;
  rep.add("classes-cover", nonempty, "sizes: " + size_list(sizes));
  rep.add("class-equals-interval", intervals);

  bool closed_ops = true;
  for (int i = 0; i < n && closed_ops; ++i)
    for (int k = 0; k < n && closed_ops; ++k) {
      if (cls[i] != cls[k] || cls[i] < 0) continue;
      TruthValue a = presheaves::tv_meet(all[i], all[k]);
      TruthValue b = presheaves::tv_join(all[i], all[k]);
      closed_ops = is_translation_tv(w, a, closed[cls[i]]) &&
                   is_translation_tv(w, b, closed[cls[i]]);
    }
  rep.add("class-lattice-closed", closed_ops);

  for (int k = 0; k < m; ++k)
    rep.counts.push_back({"class_" + std::to_string(k), sizes[k]});
  finalize(rep);
  return rep;
}

Report verify_proposition_classes(const SpectralData& sd, Exec mode,
                                  long long guard) {
  check_enumeration_gate(sd);
  Report rep;
  rep.title = "proposition-classes";
  const ContextPoset& w = *sd.W;
  std::vector<DBSubobject> all = enumerate_db_subobjects(sd, Flavor::Presheaf, guard);
  std::vector<DBSubobject> closed = enumerate_db_subobjects(sd, Flavor::Sheaf, guard);
  int n = static_cast<int>(all.size());
  int m = static_cast<int>(closed.size());
  rep.counts.push_back({"presheaf_subobjects", n});
  rep.counts.push_back({"sheaf_subobjects", m});

  std::map<std::vector<Mask>, int> closed_idx;
  for (int k = 0; k < m; ++k) closed_idx[closed[k].top] = k;

  std::vector<DBSubobject> lo(m), hi(m);
  bool extremes_ok = true;
  for (int k = 0; k < m; ++k) {
    lo[k] = iota_min(sd, closed[k]);
    hi[k] = iota_max(sd, closed[k]);
    for (int v = 0; v < w.size(); ++v)
      extremes_ok = extremes_ok && (lo[k].top[v] | hi[k].top[v]) == hi[k].top[v];
  }
  rep.add("translation-extremes", extremes_ok);

  std::vector<int> cls(n, -1);
  std::vector<char> agree(n, 0);
  par_for(mode, n, [&](int i) {
    std::vector<Mask> img(w.size());
    for (int v = 0; v < w.size(); ++v) img[v] = all[i].top[w.flat(v)];
    auto it = closed_idx.find(img);
    cls[i] = it == closed_idx.end() ? -1 : it->second;
    if (cls[i] >= 0) {
      bool in = true;
      for (int v = 0; v < w.size() && in; ++v)
        in = (lo[cls[i]].top[v] | all[i].top[v]) == all[i].top[v] &&
             (all[i].top[v] | hi[cls[i]].top[v]) == hi[cls[i]].top[v];
      agree[i] = in ? 1 : 0;
      for (int k = 0; k < m && agree[i]; ++k) {
        if (k == cls[i]) continue;
        bool other = true;
        for (int v = 0; v < w.size() && other; ++v)
          other = (lo[k].top[v] | all[i].top[v]) == all[i].top[v] &&
                  (all[i].top[v] | hi[k].top[v]) == hi[k].top[v];
        if (other) agree[i] = 0;
      }
    }
  });

  bool lands = true, intervals = true;
  std::vector<long long> sizes(m, 0);
  for (int i = 0; i < n; ++i) {
    if (cls[i] < 0) lands = false;
    else {
      sizes[cls[i]]++;
      intervals = intervals && agree[i];
    }
  }
  rep.add("image-lands-closed", lands);
  bool surj = true;
  for (long long s : sizes) surj = surj && s > 0;
  rep.add("image-surjective", surj, "sizes: " + size_list(sizes));
  rep.add("class-equals-interval", intervals);

  bool closed_ops = true;
  for (int i = 0; i < n && closed_ops; ++i)
    for (int k = i; k < n && closed_ops; ++k) {
      if (cls[i] != cls[k] || cls[i] < 0) continue;
      DBSubobject a = all[i], b = all[i];
      for (int v = 0; v < w.size(); ++v) {
        a.top[v] = all[i].top[v] & all[k].top[v];
        b.top[v] = all[i].top[v] | all[k].top[v];
      }
      closed_ops = spectral::is_db(sd, a) && spectral::is_db(sd, b) &&
                   is_translation_prop(sd, a, closed[cls[i]]) &&
                   is_translation_prop(sd, b, closed[cls[i]]);
    }
  rep.add("class-lattice-closed", closed_ops);

  for (int k = 0; k < m; ++k)
    rep.counts.push_back({"class_" + std::to_string(k), sizes[k]});
  finalize(rep);
  return rep;
}

namespace {

// Stage containment of materialized truth presheaves.
bool m_stage_subset(const SpectralData& sd, const TruthPresheafM& a,
                    const TruthPresheafM& b) {
  for (size_t v = 0; v < a.gen.size(); ++v) {
    if (!a.gen[v].has_value()) continue;
    if (!b.gen[v].has_value()) return false;
    if (!truth::local_leq(sd, *b.gen[v], *a.gen[v])) return false;
  }
  return true;
}

bool m_equal(const TruthPresheafM& a, const TruthPresheafM& b) {
  if (a.gen.size() != b.gen.size()) return false;
  for (size_t v = 0; v < a.gen.size(); ++v) {
    if (a.gen[v].has_value() != b.gen[v].has_value()) return false;
    if (a.gen[v].has_value() && !(*a.gen[v] == *b.gen[v])) return false;
  }
  return true;
}

TruthPresheafM m_meet(const SpectralData& sd, const TruthPresheafM& a,
                      const TruthPresheafM& b) {
  TruthPresheafM out;
  out.flavor = a.flavor;
  out.gen.resize(a.gen.size());
  for (size_t v = 0; v < a.gen.size(); ++v)
    if (a.gen[v].has_value() && b.gen[v].has_value())
      out.gen[v] = truth::local_join(sd, *a.gen[v], *b.gen[v]);
  return out;
}

TruthPresheafM m_join(const SpectralData& sd, const TruthPresheafM& a,
                      const TruthPresheafM& b) {
  TruthPresheafM out;
  out.flavor = a.flavor;
  out.gen.resize(a.gen.size());
  for (size_t v = 0; v < a.gen.size(); ++v) {
    if (a.gen[v].has_value() && b.gen[v].has_value())
      out.gen[v] = truth::local_meet(sd, *a.gen[v], *b.gen[v]);
    else if (a.gen[v].has_value())
      out.gen[v] = a.gen[v];
    else if (b.gen[v].has_value())
      out.gen[v] = b.gen[v];
  }
  return out;
}

}  // namespace

Report verify_truth_object_classes(const SpectralData& sd,
                                   const std::vector<TruthPresheafM>& samples,
                                   Exec mode, long long guard) {
  check_enumeration_gate(sd);
  Report rep;
  rep.title = "truth-object-classes";
  LocalsCache cache = make_cache(sd, guard);

  std::vector<TruthPresheafM> all =
      truth::enumerate_truth_presheaves(sd, Flavor::Presheaf, guard);
  int n = static_cast<int>(all.size());
  rep.counts.push_back({"truth_presheaves", n});
  rep.counts.push_back({"samples", static_cast<long long>(samples.size())});

  bool samples_ok = true;
  for (const TruthPresheafM& s : samples)
    samples_ok = samples_ok && s.flavor == Flavor::Sheaf && truth::truth_m_valid(sd, s);
  rep.add("samples-valid", samples_ok);
  if (!samples_ok) {
    finalize(rep);
    return rep;
  }

  // Distinct samples only; duplicated inputs share a class.
  std::vector<int> uniq;
  for (int k = 0; k < static_cast<int>(samples.size()); ++k) {
    bool dup = false;
    for (int u : uniq) dup = dup || m_equal(samples[k], samples[u]);
    if (!dup) uniq.push_back(k);
  }
  int m = static_cast<int>(uniq.size());

  std::vector<TruthPresheafM> lo, hi;
  bool extremes_ok = true;
  for (int u : uniq) {
    lo.push_back(jmath_min_m(sd, samples[u], guard));
    hi.push_back(jmath_max_m(sd, samples[u], guard));
    extremes_ok = extremes_ok && truth::truth_m_valid(sd, lo.back()) &&
                  truth::truth_m_valid(sd, hi.back()) &&
                  m_stage_subset(sd, lo.back(), hi.back()) &&
                  translation_truth_cached(sd, lo.back(), samples[u], cache) &&
                  translation_truth_cached(sd, hi.back(), samples[u], cache);
  }
  rep.add("translation-extremes", extremes_ok);

  std::vector<std::vector<char>> trans(m, std::vector<char>(n, 0));
  std::vector<std::vector<char>> inter(m, std::vector<char>(n, 0));
  par_for(mode, n * m, [&](int idx) {
    int k = idx / n, i = idx % n;
    trans[k][i] =
        translation_truth_cached(sd, all[i], samples[uniq[k]], cache) ? 1 : 0;
    inter[k][i] = (m_stage_subset(sd, lo[k], all[i]) &&
                   m_stage_subset(sd, all[i], hi[k]))
                      ? 1
                      : 0;
  });

  bool intervals = true, disjoint = true;
  std::vector<long long> sizes(m, 0);
  for (int i = 0; i < n; ++i) {
    int hits = 0;
    for (int k = 0; k < m; ++k) {
      intervals = intervals && trans[k][i] == inter[k][i];
      if (trans[k][i]) {
        sizes[k]++;
        hits++;
      }
    }
    disjoint = disjoint && hits <= 1;
  }
  rep.add("class-equals-interval", intervals, "sizes: " + size_list(sizes));
  rep.add("classes-disjoint", disjoint);

  bool closed_ops = true;
  for (int k = 0; k < m && closed_ops; ++k) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (trans[k][i]) members.push_back(i);
    for (size_t a = 0; a < members.size() && closed_ops; ++a)
      for (size_t b = a; b < members.size() && closed_ops; ++b) {
        TruthPresheafM mm = m_meet(sd, all[members[a]], all[members[b]]);
        TruthPresheafM jj = m_join(sd, all[members[a]], all[members[b]]);
        closed_ops = truth::truth_m_valid(sd, mm) && truth::truth_m_valid(sd, jj) &&
                     translation_truth_cached(sd, mm, samples[uniq[k]], cache) &&
                     translation_truth_cached(sd, jj, samples[uniq[k]], cache);
      }
  }
  rep.add("class-lattice-closed", closed_ops);

  std::vector<char> some(n, 0);
  par_for(mode, n, [&](int i) {
    some[i] = is_translation_of_some_cached(sd, all[i], cache) ? 1 : 0;
  });
  long long orphans = 0;
  for (int i = 0; i < n; ++i)
    if (!some[i]) orphans++;
  rep.add("non-translation-census", true,
          orphans > 0 ? "some truth presheaves translate no truth sheaf"
                      : "every truth presheaf translates a truth sheaf");
  rep.counts.push_back({"non_translations", orphans});

  for (int k = 0; k < m; ++k)
    rep.counts.push_back({"class_" + std::to_string(k), sizes[k]});
  finalize(rep);
  return rep;
}

}  // namespace qtopos::translate
