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

#include "qtopos/contexts.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace qtopos::contexts {

using linops::AlgebraBasis;
using linops::Mat;

namespace {

using CtxKey = std::vector<std::vector<std::pair<long long, long long>>>;

CtxKey key_of(const std::vector<Mat>& minimal) {
  CtxKey key;
  key.reserve(minimal.size());
  for (const Mat& p : minimal) key.push_back(linops::entry_key(p));
  return key;
}

bool algebra_subset(const Context& a, const Context& b, double tol) {
  for (const Mat& p : a.minimal)
    if (!linops::algebra_member(b.span, p, tol)) return false;
  return true;
}

struct Builder {
  int dim;
  BuildOptions opt;
  Rng rng;
  std::vector<Context> ctxs;
  std::map<CtxKey, int> index;

  explicit Builder(int d, const BuildOptions& o) : dim(d), opt(o), rng(o.seed) {}

  int add(const AlgebraBasis& algebra, const std::string& label) {
    std::vector<Mat> minimal = linops::minimal_projections(algebra, rng, opt.eps);
    CtxKey key = key_of(minimal);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (static_cast<int>(ctxs.size()) >= opt.max_contexts)
      throw SizeLimit("context poset exceeds max_contexts = " +
                      std::to_string(opt.max_contexts));
    Context c;
    c.id = static_cast<int>(ctxs.size());
    c.label = label;
    c.minimal = std::move(minimal);
    // Minimal projections are pairwise Frobenius-orthogonal and span the
    // algebra, so normalizing them gives an orthonormal basis.
    c.span.dim = dim;
    for (const Mat& p : c.minimal) c.span.basis.push_back(p / linops::frob_norm(p));
    index.emplace(std::move(key), c.id);
    ctxs.push_back(std::move(c));
    return ctxs.back().id;
  }
};

}  // namespace

AlgebraBasis span_intersection(const AlgebraBasis& a, const AlgebraBasis& b) {
  if (a.dim != b.dim) throw InvalidInput("ambient dimension mismatch");
  const int n = a.dim, ra = a.rank(), rb = b.rank();
  // Null vectors (x, y) of [A | -B] give common elements A x = B y.
  Mat c(n * n, ra + rb);
  for (int k = 0; k < ra; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) c(i + n * j, k) = a.basis[k](i, j);
  for (int k = 0; k < rb; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) c(i + n * j, ra + k) = -b.basis[k](i, j);
  Mat gram = c.adjoint() * c;
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  const double tol = 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
  std::vector<Mat> members;
  for (int k = 0; k < ra + rb; ++k) {
    if (es.eigenvalues()(k) > tol) continue;
    Mat x = Mat::Zero(n, n);
    for (int l = 0; l < ra; ++l) x += es.eigenvectors()(l, k) * a.basis[l];
    members.push_back(x);
  }
  AlgebraBasis out;
  out.dim = n;
  // Gram-Schmidt the raw null vectors in their deterministic order.
  for (const Mat& m : members) {
    Mat v = m;
    for (const Mat& e : out.basis) v -= linops::frob_inner(e, v) * e;
    for (const Mat& e : out.basis) v -= linops::frob_inner(e, v) * e;
    double nrm = linops::frob_norm(v);
    if (nrm > 1e-10) out.basis.push_back(v / nrm);
  }
  return out;
}

IdSet ContextPoset::u_flat(int v) const {
  IdSet out(size());
  for (int w = 0; w < size(); ++w)
    if (leq(v, flat_of_[w])) out.set(w);
  return out;
}

int ContextPoset::phi(const std::vector<std::string>& names) const {
  std::vector<Mat> gens;
  for (const std::string& name : names) {
    bool found = false;
    for (size_t k = 0; k < observables.size(); ++k)
      if (observables[k].name == name) {
        gens.push_back(exps[k]);
        found = true;
      }
    if (!found) throw InvalidInput("unknown observable: " + name);
  }
  linops::GeneratedAlgebra g = linops::generated_algebra(gens, dim, eps);
  if (!g.commutative)
    throw NonCommutingSet("observable exponentials do not commute");
  Rng rng(12345);
  std::vector<Mat> minimal = linops::minimal_projections(g.algebra, rng, eps);
  int id = find_by_minimal(minimal);
  if (id < 0)
    throw ClosureViolation("phi image missing from the closed poset");
  return id;
}

std::vector<std::string> ContextPoset::psi(int v) const {
  std::vector<std::string> out;
  for (size_t k = 0; k < observables.size(); ++k)
    if (linops::algebra_member(ctxs[v].span, exps[k], 1e-8))
      out.push_back(observables[k].name);
  std::sort(out.begin(), out.end());
  return out;
}

int ContextPoset::find_by_minimal(const std::vector<Mat>& minimal) const {
  CtxKey key = key_of(minimal);
  for (const Context& c : ctxs)
    if (key_of(c.minimal) == key) return c.id;
  return -1;
}

int ContextPoset::find_by_label(const std::string& label) const {
  for (const Context& c : ctxs)
    if (c.label == label) return c.id;
  return -1;
}

std::vector<int> ContextPoset::descending() const {
  std::vector<int> ids(size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [this](int a, int b) {
    return below_[a].count() > below_[b].count();
  });
  return ids;
}

std::vector<std::pair<int, int>> ContextPoset::cover_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < size(); ++u)
    for (int v = 0; v < size(); ++v) {
      if (u == v || !leq(u, v)) continue;
      bool cover = true;
      for (int z = 0; z < size(); ++z)
        if (z != u && z != v && leq(u, z) && leq(z, v)) {
          cover = false;
          break;
        }
      if (cover) out.emplace_back(u, v);
    }
  return out;
}

ContextPoset build_poset(int dim, const std::vector<Observable>& observables,
                         const std::vector<SeedContext>& seeds,
                         const BuildOptions& options) {
  if (dim < 1 || dim > linops::kMaxDim)
    throw InvalidInput("dimension out of range [1, 16]");
  if (observables.size() > 12)
    throw InvalidInput("at most 12 observables are supported");
  {
    std::set<std::string> names;
    for (const Observable& o : observables) {
      if (o.name.empty()) throw InvalidInput("observable with empty name");
      if (!names.insert(o.name).second)
        throw InvalidInput("duplicate observable name: " + o.name);
      linops::check_matrix(o.op, dim);
      linops::validate_hermitian(o.op, 1e-8);
    }
  }

  Builder b(dim, options);
  std::vector<Mat> exps;
  for (const Observable& o : observables)
    exps.push_back(linops::matrix_exp_i(o.op, options.eps));

  // phi images of all commuting subsets of the observables, smallest first.
  const int k = static_cast<int>(observables.size());
  std::vector<int> subsets(1 << k);
  std::iota(subsets.begin(), subsets.end(), 0);
  std::stable_sort(subsets.begin(), subsets.end(), [](int x, int y) {
    return __builtin_popcount(x) < __builtin_popcount(y);
  });
  std::map<int, int> phi_of_subset;
  for (int mask : subsets) {
    std::vector<Mat> gens;
    std::string label = "CI";
    for (int i = 0; i < k; ++i)
      if (mask & (1 << i)) {
        gens.push_back(exps[i]);
        label = label == "CI" ? "phi(" + observables[i].name
                              : label + "," + observables[i].name;
      }
    if (mask) label += ")";
    linops::GeneratedAlgebra g = linops::generated_algebra(gens, dim, options.eps);
    if (!g.commutative) continue;
    phi_of_subset[mask] = b.add(g.algebra, label);
  }

  for (const SeedContext& s : seeds) {
    if (s.name.empty()) throw InvalidInput("seed context with empty name");
    for (const Mat& g : s.gens) linops::check_matrix(g, dim);
    linops::GeneratedAlgebra g = linops::generated_algebra(s.gens, dim, options.eps);
    if (!g.commutative)
      throw NonCommutingSet("seed context '" + s.name +
                            "' has noncommuting generators");
    b.add(g.algebra, s.name);
  }

  // Close under pairwise intersection.
  for (size_t i = 0; i < b.ctxs.size(); ++i)
    for (size_t j = 0; j < i; ++j) {
      AlgebraBasis inter = span_intersection(b.ctxs[i].span, b.ctxs[j].span);
      b.add(inter, b.ctxs[j].label + "∩" + b.ctxs[i].label);
    }

  ContextPoset w;
  w.dim = dim;
  w.eps = options.eps;
  w.ctxs = std::move(b.ctxs);
  w.observables = observables;
  w.exps = exps;
  const int n = w.size();

  w.below_.assign(n, IdSet(n));
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u)
      if (algebra_subset(w.ctxs[u], w.ctxs[v], 1e-8)) w.below_[v].set(u);

  // Order sanity: antisymmetry and transitivity.
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      if (a != c && w.leq(a, c) && w.leq(c, a))
        throw ClosureViolation("duplicate contexts survived deduplication");
      if (w.leq(a, c) && !w.below_[a].subset_of(w.below_[c]))
        throw ClosureViolation("order is not transitive");
    }

  for (int v = 0; v < n; ++v)
    if (w.ctxs[v].span.rank() == 1) w.bottom_ = v;
  if (w.bottom_ < 0) throw ClosureViolation("trivial context missing");
  for (int v = 0; v < n; ++v)
    if (!w.leq(w.bottom_, v))
      throw ClosureViolation("trivial context is not the bottom");

  // Meets from the order; intersection closure guarantees existence.
  w.meet_.assign(n, std::vector<int>(n, -1));
  for (int a = 0; a < n; ++a)
    for (int c = 0; c <= a; ++c) {
      IdSet lower = w.below_[a] & w.below_[c];
      int best = -1;
      for (int z : lower.members())
        if (best < 0 || w.leq(best, z)) best = z;
      for (int z : lower.members())
        if (!w.leq(z, best))
          throw ClosureViolation("poset is not closed under intersections");
      w.meet_[a][c] = w.meet_[c][a] = best;
    }

  // flat = phi . psi, via the subset-to-phi map.
  w.flat_of_.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    int mask = 0;
    for (int i = 0; i < k; ++i)
      if (linops::algebra_member(w.ctxs[v].span, exps[i], 1e-8)) mask |= 1 << i;
    auto it = phi_of_subset.find(mask);
    if (it == phi_of_subset.end())
      throw ClosureViolation("flat image missing from the poset");
    w.flat_of_[v] = it->second;
  }

  // Closure-operator axioms for flat.
  for (int v = 0; v < n; ++v) {
    if (!w.leq(w.flat_of_[v], v))
      throw ClosureViolation("flat is not deflationary");
    if (w.flat_of_[w.flat_of_[v]] != w.flat_of_[v])
      throw ClosureViolation("flat is not idempotent");
    for (int u = 0; u < n; ++u)
      if (w.leq(u, v) && !w.leq(w.flat_of_[u], w.flat_of_[v]))
        throw ClosureViolation("flat is not monotone");
  }

  // Adjunction: phi(C) <= V iff C is contained in psi(V).
  for (const auto& [mask, id] : phi_of_subset)
    for (int v = 0; v < n; ++v) {
      bool lhs = w.leq(id, v);
      bool rhs = true;
      for (int i = 0; i < k; ++i)
        if ((mask & (1 << i)) &&
            !linops::algebra_member(w.ctxs[v].span, exps[i], 1e-8))
          rhs = false;
      if (lhs != rhs) throw ClosureViolation("adjunction check failed");
    }

  return w;
}

}  // namespace qtopos::contexts
