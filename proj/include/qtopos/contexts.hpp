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

#include "qtopos/linops.hpp"
#include "qtopos/util.hpp"

namespace qtopos::contexts {

// A named Hermitian operator playing the role of a classical observable.
struct Observable {
  std::string name;
  linops::Mat op;
};

struct SeedContext {
  std::string name;
  std::vector<linops::Mat> gens;
};

// A commutative unital *-subalgebra of M_n, identified by its canonical
// list of minimal projections (which partition the identity).
struct Context {
  int id = -1;
  std::string label;
  std::vector<linops::Mat> minimal;
  linops::AlgebraBasis span;
  int n_min() const { return static_cast<int>(minimal.size()); }
};

struct BuildOptions {
  int max_contexts = 64;
  double eps = kDefaultEps;
  uint64_t seed = 12345;
};

// Finite poset of contexts, ordered by algebra inclusion, closed under
// pairwise intersection and under the composite closure operator
// flat = phi . psi induced by the observables:
//   psi(V) = observables whose exponential lies in V,
//   phi(C) = algebra generated by the exponentials of C.
class ContextPoset {
 public:
  int dim = 0;
  double eps = kDefaultEps;
  std::vector<Context> ctxs;
  std::vector<Observable> observables;
  std::vector<linops::Mat> exps;  // e^{i obs} per observable

  int size() const { return static_cast<int>(ctxs.size()); }
  bool leq(int a, int b) const { return below_[b].test(a); }
  const IdSet& below(int v) const { return below_[v]; }
  int flat(int v) const { return flat_of_[v]; }
  bool is_flat_fixed(int v) const { return flat_of_[v] == v; }
  int bottom() const { return bottom_; }
  int meet(int a, int b) const { return meet_[a][b]; }

  // {W : V subalgebra of flat(W)}; antitone in V.
  IdSet u_flat(int v) const;

  // Context generated by the exponentials of the named observables.
  // Throws NonCommutingSet if they fail to commute, InvalidInput on an
  // unknown name.
  int phi(const std::vector<std::string>& names) const;
  // Names of the observables whose exponential lies in V (sorted).
  std::vector<std::string> psi(int v) const;

  int find_by_minimal(const std::vector<linops::Mat>& minimal) const;
  int find_by_label(const std::string& label) const;

  // Ids in a linear extension with larger contexts first.
  std::vector<int> descending() const;
  // Hasse diagram edges as (lower, upper) pairs.
  std::vector<std::pair<int, int>> cover_pairs() const;

  // Construction internals, fixed by build_poset.
  std::vector<IdSet> below_;
  std::vector<int> flat_of_;
  std::vector<std::vector<int>> meet_;
  int bottom_ = -1;
};

// Builds the closure of {phi(C) : C a commuting subset of the observables}
// together with the seed contexts, under pairwise intersection.  Verifies
// the adjunction between phi and psi and the closure-operator axioms for
// flat (deflationary, monotone, idempotent); throws ClosureViolation if any
// fail, SizeLimit when the poset would exceed options.max_contexts,
// NonCommutingSet for seeds with noncommuting generators.
ContextPoset build_poset(int dim, const std::vector<Observable>& observables,
                         const std::vector<SeedContext>& seeds,
                         const BuildOptions& options = {});

// Span intersection of two algebras (the order-theoretic meet).
linops::AlgebraBasis span_intersection(const linops::AlgebraBasis& a,
                                       const linops::AlgebraBasis& b);

}  // namespace qtopos::contexts
