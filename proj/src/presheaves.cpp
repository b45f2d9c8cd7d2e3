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

#include "qtopos/presheaves.hpp"

#include <algorithm>
#include <functional>

namespace qtopos::presheaves {

using contexts::ContextPoset;

bool Presheaf::functorial() const {
  const int n = W->size();
  for (int v = 0; v < n; ++v) {
    if (restr[v][v].size() != static_cast<size_t>(stage[v])) return false;
    for (int e = 0; e < stage[v]; ++e)
      if (restr[v][v][e] != e) return false;
    for (int u = 0; u < n; ++u) {
      if (!W->leq(u, v)) continue;
      for (int t = 0; t < n; ++t) {
        if (!W->leq(t, u)) continue;
        for (int e = 0; e < stage[v]; ++e)
          if (restr[u][t][restr[v][u][e]] != restr[v][t][e]) return false;
      }
    }
  }
  return true;
}

bool Presheaf::same_shape(const Presheaf& other) const {
  if (W != other.W || stage != other.stage) return false;
  return restr == other.restr;
}

bool is_sieve(const ContextPoset& w, const Sieve& s) {
  if (s.at < 0 || s.at >= w.size()) return false;
  if (!s.members.subset_of(w.below(s.at))) return false;
  for (int v : s.members.members())
    if (!(w.below(v) & w.below(s.at)).subset_of(s.members)) return false;
  return true;
}

Sieve full_sieve(const ContextPoset& w, int v) { return {v, w.below(v)}; }

Sieve empty_sieve(const ContextPoset& w, int v) {
  return {v, IdSet(w.size())};
}

Sieve restrict_sieve(const ContextPoset& w, const Sieve& s, int u) {
  return {u, s.members & w.below(u)};
}

Sieve apply_j(const ContextPoset& w, const Sieve& s) {
  Sieve out = empty_sieve(w, s.at);
  for (int u : w.below(s.at).members())
    if (s.members.test(w.flat(u))) out.members.set(u);
  return out;
}

bool sieve_j_closed(const ContextPoset& w, const Sieve& s) {
  for (int u : w.below(s.at).members())
    if (s.members.test(w.flat(u)) && !s.members.test(u)) return false;
  return true;
}

namespace {

// All down-closed subsets of a given down-closed ground set, in increasing
// bitmask order over the ground set's member list.
std::vector<IdSet> downsets_within(const ContextPoset& w, const IdSet& ground,
                                   long long guard) {
  std::vector<int> mem = ground.members();
  const int m = static_cast<int>(mem.size());
  if (m > 24) throw SizeLimit("downset enumeration over more than 24 contexts");
  std::vector<IdSet> out;
  for (uint32_t mask = 0; mask < (uint32_t{1} << m); ++mask) {
    IdSet cand(w.size());
    for (int i = 0; i < m; ++i)
      if (mask & (uint32_t{1} << i)) cand.set(mem[i]);
    bool down = true;
    for (int i = 0; i < m && down; ++i)
      if (cand.test(mem[i]) && !(w.below(mem[i]) & ground).subset_of(cand))
        down = false;
    if (down) {
      out.push_back(cand);
      if (static_cast<long long>(out.size()) > guard)
        throw SizeLimit("downset enumeration exceeds guard");
    }
  }
  return out;
}

OmegaData build_omega_impl(const ContextPoset& w, bool j_only) {
  OmegaData om;
  const int n = w.size();
  om.pshf.W = &w;
  om.pshf.stage.assign(n, 0);
  om.sieves.resize(n);
  om.index.resize(n);
  for (int v = 0; v < n; ++v) {
    for (const IdSet& d : downsets_within(w, w.below(v), 2000000)) {
      if (j_only && !sieve_j_closed(w, Sieve{v, d})) continue;
      om.index[v].emplace(d, static_cast<int>(om.sieves[v].size()));
      om.sieves[v].push_back(d);
    }
    om.pshf.stage[v] = static_cast<int>(om.sieves[v].size());
  }
  om.pshf.restr.assign(n, std::vector<std::vector<int>>(n));
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      if (!w.leq(u, v)) continue;
      om.pshf.restr[v][u].resize(om.pshf.stage[v]);
      for (int e = 0; e < om.pshf.stage[v]; ++e) {
        IdSet cut = om.sieves[v][e] & w.below(u);
        om.pshf.restr[v][u][e] = om.id_of(u, cut);
      }
    }
  return om;
}

}  // namespace

int OmegaData::id_of(int v, const IdSet& members) const {
  auto it = index[v].find(members);
  if (it == index[v].end())
    throw Error("sieve missing from stage enumeration");
  return it->second;
}

OmegaData build_omega(const ContextPoset& w) {
  return build_omega_impl(w, false);
}

OmegaData build_omega_j(const ContextPoset& w) {
  OmegaData om = build_omega_impl(w, true);
  // Equalizer property: the stage must be exactly the fixed points of j.
  OmegaData full = build_omega_impl(w, false);
  for (int v = 0; v < w.size(); ++v) {
    int fixed = 0;
    for (const IdSet& d : full.sieves[v]) {
      Sieve s{v, d};
      if (apply_j(w, s).members == d) {
        ++fixed;
        if (om.index[v].find(d) == om.index[v].end())
          throw Error("j-fixed sieve missing from the j-stage");
      }
    }
    if (fixed != om.pshf.stage[v])
      throw Error("j-stage does not equal the fixed points of j");
  }
  return om;
}

bool Subpresheaf::valid() const {
  const ContextPoset& w = *Q->W;
  for (int v = 0; v < w.size(); ++v)
    for (int u = 0; u < w.size(); ++u) {
      if (!w.leq(u, v)) continue;
      for (int e : elems[v].members())
        if (!elems[u].test(Q->map(v, u, e))) return false;
    }
  return true;
}

bool Subpresheaf::full() const {
  for (int v = 0; v < static_cast<int>(elems.size()); ++v)
    if (elems[v].count() != Q->stage[v]) return false;
  return true;
}

int Subpresheaf::count() const {
  int c = 0;
  for (const IdSet& s : elems) c += s.count();
  return c;
}

Subpresheaf full_subpresheaf(const Presheaf& q) {
  Subpresheaf s;
  s.Q = &q;
  for (int v = 0; v < q.W->size(); ++v) {
    IdSet stage(q.stage[v]);
    for (int e = 0; e < q.stage[v]; ++e) stage.set(e);
    s.elems.push_back(stage);
  }
  return s;
}

Subpresheaf closure_j(const Subpresheaf& s) {
  const ContextPoset& w = *s.Q->W;
  Subpresheaf out;
  out.Q = s.Q;
  out.elems.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    out.elems[v] = IdSet(s.Q->stage[v]);
    for (int e = 0; e < s.Q->stage[v]; ++e)
      if (s.elems[w.flat(v)].test(s.Q->map(v, w.flat(v), e)))
        out.elems[v].set(e);
  }
  return out;
}

bool is_dense(const Subpresheaf& s) { return closure_j(s).full(); }

bool is_closed(const Subpresheaf& s) {
  Subpresheaf c = closure_j(s);
  for (size_t v = 0; v < s.elems.size(); ++v)
    if (!(c.elems[v] == s.elems[v])) return false;
  return true;
}

Presheaf sheafify(const Presheaf& q) {
  const ContextPoset& w = *q.W;
  const int n = w.size();
  Presheaf out;
  out.W = &w;
  out.stage.resize(n);
  out.restr.assign(n, std::vector<std::vector<int>>(n));
  for (int v = 0; v < n; ++v) out.stage[v] = q.stage[w.flat(v)];
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u)
      if (w.leq(u, v)) out.restr[v][u] = q.restr[w.flat(v)][w.flat(u)];
  return out;
}

Presheaf down_restrict(const Presheaf& q, int v) {
  const ContextPoset& w = *q.W;
  const int n = w.size();
  Presheaf out;
  out.W = &w;
  out.stage.assign(n, 0);
  out.restr.assign(n, std::vector<std::vector<int>>(n));
  for (int x = 0; x < n; ++x) {
    if (!w.leq(x, v)) continue;
    out.stage[x] = q.stage[x];
    for (int u = 0; u < n; ++u)
      if (w.leq(u, x)) out.restr[x][u] = q.restr[x][u];
  }
  return out;
}

Subpresheaf sheafify_sub(const Subpresheaf& s, const Presheaf& flat_q) {
  const ContextPoset& w = *s.Q->W;
  Subpresheaf out;
  out.Q = &flat_q;
  out.elems.resize(w.size());
  for (int v = 0; v < w.size(); ++v) out.elems[v] = s.elems[w.flat(v)];
  return out;
}

bool NatTransform::total() const {
  for (int v = 0; v < src->W->size(); ++v)
    for (int e = 0; e < src->stage[v]; ++e)
      if (comp[v][e] < 0) return false;
  return true;
}

bool NatTransform::natural() const {
  const ContextPoset& w = *src->W;
  for (int v = 0; v < w.size(); ++v)
    for (int u = 0; u < w.size(); ++u) {
      if (!w.leq(u, v)) continue;
      for (int e = 0; e < src->stage[v]; ++e) {
        if (comp[v][e] < 0) continue;
        int eu = src->map(v, u, e);
        if (comp[u][eu] < 0) continue;
        if (dst->map(v, u, comp[v][e]) != comp[u][eu]) return false;
      }
    }
  return true;
}

bool NatTransform::defined_on(const Subpresheaf& s) const {
  for (int v = 0; v < src->W->size(); ++v)
    for (int e = 0; e < src->stage[v]; ++e) {
      bool in = s.elems[v].test(e);
      if (in && comp[v][e] < 0) return false;
      if (!in && comp[v][e] >= 0) return false;
    }
  return true;
}

NatTransform zeta(const Presheaf& q, const Presheaf& flat_q) {
  const ContextPoset& w = *q.W;
  NatTransform z;
  z.src = &q;
  z.dst = &flat_q;
  z.comp.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    z.comp[v].resize(q.stage[v]);
    for (int e = 0; e < q.stage[v]; ++e) z.comp[v][e] = q.map(v, w.flat(v), e);
  }
  return z;
}

bool is_sheaf(const Presheaf& q) {
  const ContextPoset& w = *q.W;
  for (int v = 0; v < w.size(); ++v) {
    int f = w.flat(v);
    if (q.stage[v] != q.stage[f]) return false;
    std::vector<bool> hit(q.stage[f], false);
    for (int e = 0; e < q.stage[v]; ++e) {
      int img = q.map(v, f, e);
      if (hit[img]) return false;
      hit[img] = true;
    }
  }
  return true;
}

std::vector<NatTransform> enumerate_extensions(const Presheaf& q,
                                               const Presheaf& r,
                                               const NatTransform& lambda,
                                               long long guard) {
  const ContextPoset& w = *q.W;
  std::vector<int> order = w.descending();
  std::vector<NatTransform> found;
  NatTransform cur;
  cur.src = &q;
  cur.dst = &r;
  cur.comp = lambda.comp;
  long long nodes = 0;

  // Flatten the free slots in deterministic order.
  std::vector<std::pair<int, int>> slots;
  for (int v : order)
    for (int e = 0; e < q.stage[v]; ++e)
      if (cur.comp[v][e] < 0) slots.emplace_back(v, e);

  std::function<void(size_t)> rec = [&](size_t k) {
    if (++nodes > guard) throw SizeLimit("extension search exceeds guard");
    if (k == slots.size()) {
      found.push_back(cur);
      return;
    }
    auto [v, e] = slots[k];
    for (int img = 0; img < r.stage[v]; ++img) {
      bool ok = true;
      // Check naturality against every determined pair now involving (v,e).
      for (int u = 0; u < w.size() && ok; ++u) {
        if (w.leq(u, v)) {
          int eu = q.map(v, u, e);
          if (cur.comp[u][eu] >= 0 && r.map(v, u, img) != cur.comp[u][eu])
            ok = false;
        }
        if (w.leq(v, u) && u != v) {
          for (int f = 0; f < q.stage[u] && ok; ++f)
            if (cur.comp[u][f] >= 0 && q.map(u, v, f) == e &&
                r.map(u, v, cur.comp[u][f]) != img)
              ok = false;
        }
      }
      if (!ok) continue;
      cur.comp[v][e] = img;
      rec(k + 1);
      cur.comp[v][e] = -1;
    }
  };
  rec(0);
  return found;
}

NatTransform extend_along_dense(const Presheaf& q, const Subpresheaf& s,
                                const Presheaf& r, const NatTransform& lambda,
                                bool verify_unique, long long guard) {
  const ContextPoset& w = *q.W;
  if (s.Q != &q) throw InvalidInput("subobject does not live in the domain");
  if (!s.valid()) throw InvalidInput("subobject is not restriction-closed");
  if (!is_dense(s)) throw NotDense("subobject is not dense");
  if (!is_sheaf(r)) throw NotSheaf("codomain is not a sheaf");
  if (!lambda.defined_on(s) || !lambda.natural())
    throw InvalidInput("lambda is not a natural map defined on the subobject");

  // Inverse of the codomain's zeta components.
  std::vector<std::vector<int>> zinv(w.size());
  for (int v = 0; v < w.size(); ++v) {
    zinv[v].assign(r.stage[v], -1);
    for (int e = 0; e < r.stage[v]; ++e) zinv[v][r.map(v, w.flat(v), e)] = e;
  }

  NatTransform mu;
  mu.src = &q;
  mu.dst = &r;
  mu.comp.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    int f = w.flat(v);
    mu.comp[v].resize(q.stage[v]);
    for (int e = 0; e < q.stage[v]; ++e) {
      int ef = q.map(v, f, e);
      if (!s.elems[f].test(ef))
        throw NotDense("dense subobject misses a flat-stage element");
      mu.comp[v][e] = zinv[v][lambda.comp[f][ef]];
    }
  }
  if (!mu.natural() || !mu.total())
    throw Error("extension construction failed naturality");
  for (int v = 0; v < w.size(); ++v)
    for (int e : s.elems[v].members())
      if (mu.comp[v][e] != lambda.comp[v][e])
        throw Error("extension does not restrict to lambda");

  if (verify_unique) {
    std::vector<NatTransform> all = enumerate_extensions(q, r, lambda, guard);
    if (all.size() != 1 || all[0].comp != mu.comp)
      throw Error("extension along dense subobject is not unique");
  }
  return mu;
}

NatTransform retraction_r(const OmegaData& omega, const OmegaData& omega_j) {
  const ContextPoset& w = *omega.pshf.W;
  NatTransform r;
  r.src = &omega.pshf;
  r.dst = &omega_j.pshf;
  r.comp.resize(w.size());
  for (int v = 0; v < w.size(); ++v) {
    r.comp[v].resize(omega.pshf.stage[v]);
    for (int e = 0; e < omega.pshf.stage[v]; ++e) {
      Sieve jd = apply_j(w, Sieve{v, omega.sieves[v][e]});
      r.comp[v][e] = omega_j.id_of(v, jd.members);
    }
  }
  if (!r.natural()) throw Error("retraction is not natural");
  return r;
}

Sieve TruthValue::at(int v) const { return {v, down & W->below(v)}; }

bool TruthValue::omega_j_valued() const {
  for (int v = 0; v < W->size(); ++v)
    if (down.test(W->flat(v)) && !down.test(v)) return false;
  return true;
}

TruthValue truth_value_from_downset(const ContextPoset& w, const IdSet& down) {
  for (int v : down.members())
    if (!w.below(v).subset_of(down))
      throw InvalidInput("truth value requires a down-closed set");
  return TruthValue{&w, down};
}

TruthValue truth_value_from_family(const ContextPoset& w,
                                   const std::vector<Sieve>& family) {
  if (static_cast<int>(family.size()) != w.size())
    throw InvalidInput("family must assign one sieve per context");
  IdSet down(w.size());
  for (int v = 0; v < w.size(); ++v) {
    if (family[v].at != v || !is_sieve(w, family[v]))
      throw InvalidInput("family member is not a sieve at its context");
    if (family[v].members.test(v)) down.set(v);
  }
  TruthValue tv = truth_value_from_downset(w, down);
  for (int v = 0; v < w.size(); ++v)
    if (!(tv.at(v).members == family[v].members))
      throw InvalidInput("sieve family is not compatible");
  return tv;
}

TruthValue tv_meet(const TruthValue& a, const TruthValue& b) {
  return TruthValue{a.W, a.down & b.down};
}

TruthValue tv_join(const TruthValue& a, const TruthValue& b) {
  return TruthValue{a.W, a.down | b.down};
}

TruthValue true_j(const ContextPoset& w) {
  return TruthValue{&w, IdSet::full(w.size())};
}

std::vector<IdSet> all_downsets(const ContextPoset& w, long long guard) {
  return downsets_within(w, IdSet::full(w.size()), guard);
}

std::vector<TruthValue> gamma_omega(const ContextPoset& w, long long guard) {
  std::vector<TruthValue> out;
  for (const IdSet& d : all_downsets(w, guard)) out.push_back(TruthValue{&w, d});
  return out;
}

std::vector<TruthValue> gamma_omega_j(const ContextPoset& w, long long guard) {
  std::vector<TruthValue> out;
  for (const IdSet& d : all_downsets(w, guard)) {
    TruthValue tv{&w, d};
    if (tv.omega_j_valued()) out.push_back(tv);
  }
  return out;
}

std::vector<Subpresheaf> enumerate_subpresheaves(const Presheaf& q,
                                                 bool closed_only,
                                                 long long guard) {
  const ContextPoset& w = *q.W;
  std::vector<int> order = w.descending();
  std::vector<Subpresheaf> found;
  Subpresheaf cur;
  cur.Q = &q;
  cur.elems.resize(w.size());
  for (int v = 0; v < w.size(); ++v) cur.elems[v] = IdSet(q.stage[v]);
  long long nodes = 0;

  std::function<void(size_t)> rec = [&](size_t k) {
    if (++nodes > guard) throw SizeLimit("subobject search exceeds guard");
    if (k == order.size()) {
      if (!closed_only || is_closed(cur)) found.push_back(cur);
      return;
    }
    int v = order[k];
    // Elements forced by images of already-chosen stages above v.
    IdSet forced(q.stage[v]);
    for (size_t p = 0; p < k; ++p) {
      int s = order[p];
      if (!w.leq(v, s)) continue;
      for (int e : cur.elems[s].members()) forced.set(q.map(s, v, e));
    }
    std::vector<int> free;
    for (int e = 0; e < q.stage[v]; ++e)
      if (!forced.test(e)) free.push_back(e);
    if (free.size() > 24) throw SizeLimit("stage too large for subobject search");
    for (uint32_t mask = 0; mask < (uint32_t{1} << free.size()); ++mask) {
      cur.elems[v] = forced;
      for (size_t i = 0; i < free.size(); ++i)
        if (mask & (uint32_t{1} << i)) cur.elems[v].set(free[i]);
      rec(k + 1);
    }
    cur.elems[v] = IdSet(q.stage[v]);
  };
  rec(0);
  return found;
}

std::vector<std::vector<int>> global_elements(const Presheaf& q,
                                              long long guard) {
  const ContextPoset& w = *q.W;
  std::vector<int> order = w.descending();
  std::vector<std::vector<int>> found;
  std::vector<int> cur(w.size(), -1);
  long long nodes = 0;

  std::function<void(size_t)> rec = [&](size_t k) {
    if (++nodes > guard) throw SizeLimit("global-element search exceeds guard");
    if (k == order.size()) {
      found.push_back(cur);
      if (static_cast<long long>(found.size()) > guard)
        throw SizeLimit("global-element count exceeds guard");
      return;
    }
    int v = order[k];
    // If some processed superset exists, the value is forced.
    int forced = -1;
    bool consistent = true;
    for (size_t p = 0; p < k && consistent; ++p) {
      int s = order[p];
      if (!w.leq(v, s)) continue;
      int img = q.map(s, v, cur[s]);
      if (forced < 0)
        forced = img;
      else if (forced != img)
        consistent = false;
    }
    if (!consistent) return;
    if (forced >= 0) {
      cur[v] = forced;
      rec(k + 1);
      cur[v] = -1;
      return;
    }
    for (int e = 0; e < q.stage[v]; ++e) {
      cur[v] = e;
      rec(k + 1);
    }
    cur[v] = -1;
  };
  rec(0);
  return found;
}

}  // namespace qtopos::presheaves
