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

#include "qtopos/ks.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <set>

namespace qtopos::ks {

using contexts::ContextPoset;
using linops::Mat;
using linops::Vec;
using presheaves::Presheaf;

std::vector<Ray> peres33_rays() {
  const double s = std::sqrt(2.0);
  const std::vector<std::array<double, 3>> pats = {
      {0, 0, 1}, {0, 1, 1}, {0, 1, s}, {1, 1, s}};
  std::set<std::array<double, 3>> seen;
  std::vector<Ray> out;
  for (const auto& pat : pats) {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end());
    do {
      for (int sgn = 0; sgn < 8; ++sgn) {
        std::array<double, 3> v = {pat[idx[0]], pat[idx[1]], pat[idx[2]]};
        for (int i = 0; i < 3; ++i)
          if (sgn & (1 << i)) v[i] = -v[i];
        for (int i = 0; i < 3; ++i) {
          if (v[i] == 0.0) continue;
          if (v[i] < 0.0)
            for (int k = 0; k < 3; ++k) v[k] = -v[k];
          break;
        }
        for (int i = 0; i < 3; ++i)
          if (v[i] == 0.0) v[i] = 0.0;  // collapse -0.0
        if (seen.insert(v).second) out.push_back({v[0], v[1], v[2]});
      }
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  return out;
}

std::vector<Ray> cabello18_rays() {
  return {
      {0, 0, 0, 1},   {0, 0, 1, 0},   {1, 1, 0, 0},  {1, -1, 0, 0},
      {0, 1, 0, 0},   {1, 0, 1, 0},   {1, 0, -1, 0}, {1, -1, 1, -1},
      {1, -1, -1, 1}, {0, 0, 1, 1},   {1, 1, 1, 1},  {0, 1, 0, -1},
      {1, 0, 0, 1},   {1, 0, 0, -1},  {0, 1, -1, 0}, {1, 1, -1, 1},
      {1, 1, 1, -1},  {-1, 1, 1, 1},
  };
}

std::vector<Ray> axis_rays(int dim) {
  if (dim < 1 || dim > linops::kMaxDim)
    throw InvalidInput("axis_rays dimension out of range");
  std::vector<Ray> out(dim, Ray(dim, 0.0));
  for (int i = 0; i < dim; ++i) out[i][i] = 1.0;
  return out;
}

namespace {

void bron_kerbosch(std::vector<int>& r, std::vector<int> p, std::vector<int> x,
                   const std::vector<std::vector<bool>>& adj,
                   std::vector<std::vector<int>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  int pivot = -1, best = -1;
  for (const std::vector<int>* side : {&p, &x})
    for (int cand : *side) {
      int c = 0;
      for (int v : p)
        if (adj[cand][v]) ++c;
      if (c > best) {
        best = c;
        pivot = cand;
      }
    }
  std::vector<int> ext;
  for (int v : p)
    if (pivot < 0 || !adj[pivot][v]) ext.push_back(v);
  for (int v : ext) {
    std::vector<int> p2, x2;
    for (int u : p)
      if (adj[v][u]) p2.push_back(u);
    for (int u : x)
      if (adj[v][u]) x2.push_back(u);
    r.push_back(v);
    bron_kerbosch(r, std::move(p2), std::move(x2), adj, out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

}  // namespace

std::vector<std::vector<int>> maximal_cliques(
    const std::vector<std::vector<bool>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> p(n), r;
  for (int i = 0; i < n; ++i) p[i] = i;
  std::vector<std::vector<int>> out;
  bron_kerbosch(r, std::move(p), {}, adj, out);
  for (std::vector<int>& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct RayData {
  std::vector<Vec> unit;
  std::vector<std::vector<int>> cliques;
};

RayData analyze_rays(const std::vector<Ray>& rays, int dim) {
  if (dim < 2 || dim > linops::kMaxDim)
    throw InvalidInput("ray dimension out of range");
  if (rays.empty()) throw InvalidInput("empty ray set");
  RayData rd;
  for (const Ray& r : rays) {
    if (static_cast<int>(r.size()) != dim)
      throw InvalidInput("ray length differs from the dimension");
    Vec v(dim);
    double norm2 = 0;
    for (int i = 0; i < dim; ++i) {
      if (!std::isfinite(r[i])) throw InvalidInput("non-finite ray entry");
      v(i) = r[i];
      norm2 += r[i] * r[i];
    }
    if (norm2 < 1e-12) throw InvalidInput("zero ray");
    v /= std::sqrt(norm2);
    bool dup = false;
    for (const Vec& u : rd.unit)
      if (std::abs(u.dot(v)) > 1.0 - 1e-9) {
        dup = true;
        break;
      }
    if (!dup) rd.unit.push_back(v);
  }
  const int m = static_cast<int>(rd.unit.size());
  std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(rd.unit[i].dot(rd.unit[j])) < 1e-8)
        adj[i][j] = adj[j][i] = true;
  rd.cliques = maximal_cliques(adj);
  return rd;
}

ContextPoset poset_from(const RayData& rd, int dim, const KSOptions& opts) {
  std::vector<Mat> projs;
  projs.reserve(rd.unit.size());
  for (const Vec& u : rd.unit) projs.push_back(u * u.adjoint());

  std::vector<contexts::SeedContext> seeds;
  for (size_t k = 0; k < rd.cliques.size(); ++k) {
    contexts::SeedContext s;
    s.name = "B" + std::to_string(k + 1);
    for (int r : rd.cliques[k]) s.gens.push_back(projs[r]);
    seeds.push_back(std::move(s));
  }

  contexts::BuildOptions bo;
  bo.max_contexts = opts.max_contexts;
  bo.eps = opts.eps;
  bo.seed = opts.seed;

  // flat(V) = algebra generated by the rays lying in V.  Its image must be
  // a context; rebuild with the missing images seeded until closed.
  int extra = 0;
  for (;;) {
    ContextPoset w = contexts::build_poset(dim, {}, seeds, bo);
    const int n = w.size();
    std::vector<int> flat(n, -1);
    std::map<std::vector<int>, int> phi_cache;
    bool rebuilt = false;
    for (int v = 0; v < n && !rebuilt; ++v) {
      std::vector<int> inside;
      for (size_t r = 0; r < projs.size(); ++r)
        if (linops::algebra_member(w.ctxs[v].span, projs[r], 1e-8))
          inside.push_back(static_cast<int>(r));
      auto it = phi_cache.find(inside);
      if (it != phi_cache.end()) {
        flat[v] = it->second;
        continue;
      }
      std::vector<Mat> gens;
      for (int r : inside) gens.push_back(projs[r]);
      linops::GeneratedAlgebra g =
          linops::generated_algebra(gens, dim, opts.eps);
      Rng rng(opts.seed);
      const int id =
          w.find_by_minimal(linops::minimal_projections(g.algebra, rng, opts.eps));
      if (id < 0) {
        contexts::SeedContext s;
        s.name = "F" + std::to_string(++extra);
        s.gens = gens;
        seeds.push_back(std::move(s));
        rebuilt = true;
        break;
      }
      phi_cache.emplace(std::move(inside), id);
      flat[v] = id;
    }
    if (rebuilt) continue;
    w.flat_of_ = std::move(flat);
    for (int v = 0; v < n; ++v) {
      if (!w.leq(w.flat(v), v))
        throw ClosureViolation("ray flat is not deflationary");
      if (w.flat(w.flat(v)) != w.flat(v))
        throw ClosureViolation("ray flat is not idempotent");
      for (int u = 0; u < n; ++u)
        if (w.leq(u, v) && !w.leq(w.flat(u), w.flat(v)))
          throw ClosureViolation("ray flat is not monotone");
    }
    return w;
  }
}

// Depth-first section counting with one-hop forced propagation: assigning a
// stage forces every stage strictly below it, and candidates at later stages
// are filtered against everything already forced.
struct SectionSearch {
  const Presheaf& q;
  std::vector<int> order;
  std::vector<std::vector<int>> strictly_below;

  explicit SectionSearch(const Presheaf& qq) : q(qq) {
    const ContextPoset& w = *q.W;
    order = w.descending();
    strictly_below.resize(w.size());
    for (int v = 0; v < w.size(); ++v)
      for (int u : w.below(v).members())
        if (u != v) strictly_below[v].push_back(u);
  }

  struct Budget {
    long long limit = 0;
    long long used = 0;
    long long pending = 0;
    std::atomic<long long>* shared = nullptr;
    std::atomic<bool>* stop = nullptr;
    bool exceeded = false;

    bool tick() {
      if (shared == nullptr) {
        if (++used > limit) exceeded = true;
        return exceeded;
      }
      if (++pending >= 1024) flush();
      if (stop->load(std::memory_order_relaxed)) exceeded = true;
      return exceeded;
    }
    void flush() {
      if (pending == 0) return;
      const long long total =
          shared->fetch_add(pending, std::memory_order_relaxed) + pending;
      pending = 0;
      if (total > limit) stop->store(true, std::memory_order_relaxed);
    }
  };

  bool place(std::vector<int>& assign, std::vector<int>& trail, int v,
             int e) const {
    assign[v] = e;
    trail.push_back(v);
    for (int u : strictly_below[v]) {
      const int f = q.map(v, u, e);
      if (assign[u] < 0) {
        assign[u] = f;
        trail.push_back(u);
      } else if (assign[u] != f) {
        return false;
      }
    }
    return true;
  }

  long long dfs(std::vector<int>& assign, size_t k, Budget& b) const {
    while (k < order.size() && assign[order[k]] >= 0) ++k;
    if (k == order.size()) return 1;
    const int v = order[k];
    long long total = 0;
    std::vector<int> trail;
    for (int e = 0; e < q.stage[v]; ++e) {
      if (b.tick()) return total;
      trail.clear();
      if (place(assign, trail, v, e)) total += dfs(assign, k + 1, b);
      for (int u : trail) assign[u] = -1;
      if (b.exceeded) return total;
    }
    return total;
  }
};

}  // namespace

ContextPoset ray_poset(const std::vector<Ray>& rays, int dim,
                       const KSOptions& opts) {
  return poset_from(analyze_rays(rays, dim), dim, opts);
}

long long count_sections(const Presheaf& q, Exec mode, long long guard) {
  if (q.W == nullptr) throw InvalidInput("presheaf without a poset");
  const int n = q.W->size();
  for (int v = 0; v < n; ++v)
    if (q.stage[v] == 0) return 0;
  SectionSearch s(q);
  std::vector<int> empty(n, -1);

  if (mode == Exec::Serial) {
    SectionSearch::Budget b;
    b.limit = guard;
    long long total = s.dfs(empty, 0, b);
    if (b.exceeded) throw SizeLimit("section search exceeded its guard");
    return total;
  }

  // Deterministic prefix frontier, one subtree per parallel task.
  struct Prefix {
    std::vector<int> assign;
    size_t k = 0;
  };
  std::vector<Prefix> frontier{{empty, 0}};
  long long complete = 0;
  long long expand_nodes = 0;
  const int target = 64;
  for (;;) {
    if (static_cast<int>(frontier.size()) >= target) break;
    std::vector<Prefix> next;
    bool any = false;
    for (Prefix& p : frontier) {
      size_t k = p.k;
      while (k < s.order.size() && p.assign[s.order[k]] >= 0) ++k;
      if (k == s.order.size()) {
        ++complete;
        continue;
      }
      any = true;
      const int v = s.order[k];
      for (int e = 0; e < q.stage[v]; ++e) {
        if (++expand_nodes > guard)
          throw SizeLimit("section search exceeded its guard");
        Prefix child{p.assign, k + 1};
        std::vector<int> trail;
        if (s.place(child.assign, trail, v, e)) next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
    if (!any) break;
  }

  std::atomic<long long> used{expand_nodes};
  std::atomic<bool> stop{false};
  std::vector<long long> counts(frontier.size(), 0);
  par_for(Exec::Parallel, static_cast<int>(frontier.size()), [&](int i) {
    SectionSearch::Budget b;
    b.limit = guard;
    b.shared = &used;
    b.stop = &stop;
    std::vector<int> assign = frontier[i].assign;
    counts[i] = s.dfs(assign, frontier[i].k, b);
    b.flush();
  });
  if (stop.load()) throw SizeLimit("section search exceeded its guard");
  long long total = complete;
  for (long long c : counts) total += c;
  return total;
}

KSResult ks_check_rays(const std::string& name, const std::vector<Ray>& rays,
                       int dim, const KSOptions& opts) {
  RayData rd = analyze_rays(rays, dim);
  ContextPoset w = poset_from(rd, dim, opts);
  spectral::SpectralData sd = spectral::build_spectral(w, opts.eps);
  Presheaf flat_sigma = presheaves::sheafify(sd.sigma);

  KSResult res;
  res.name = name;
  res.dim = dim;
  res.n_rays = static_cast<int>(rd.unit.size());
  for (const std::vector<int>& c : rd.cliques)
    if (static_cast<int>(c.size()) == dim) ++res.n_bases;
  res.n_cliques = static_cast<int>(rd.cliques.size());
  res.n_contexts = w.size();
  res.sections = count_sections(flat_sigma, opts.mode, opts.guard);
  return res;
}

KSResult ks_check_poset(const std::string& name,
                        const spectral::SpectralData& sd, Exec mode,
                        long long guard) {
  const ContextPoset& w = *sd.W;
  KSResult res;
  res.name = name;
  res.dim = w.dim;
  res.n_contexts = w.size();

  std::vector<Mat> rays;
  for (const contexts::Context& c : w.ctxs)
    for (const Mat& p : c.minimal) {
      if (std::abs(p.trace().real() - 1.0) > 1e-6) continue;
      bool dup = false;
      for (const Mat& q : rays)
        if (linops::frob_norm(p - q) < 1e-6) {
          dup = true;
          break;
        }
      if (!dup) rays.push_back(p);
    }
  res.n_rays = static_cast<int>(rays.size());

  for (int v = 0; v < w.size(); ++v) {
    bool maximal = true;
    for (int z = 0; z < w.size() && maximal; ++z)
      if (z != v && w.leq(v, z)) maximal = false;
    if (maximal) {
      ++res.n_cliques;
      if (w.ctxs[v].n_min() == w.dim) ++res.n_bases;
    }
  }

  res.sections = count_sections(presheaves::sheafify(sd.sigma), mode, guard);
  return res;
}

}  // namespace qtopos::ks
