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

#include <map>
#include <vector>

#include "qtopos/contexts.hpp"
#include "qtopos/util.hpp"

namespace qtopos::presheaves {

// Presheaf on a context poset with finite stages.  Stage elements are dense
// integer ids; restr[v][u] (defined when u <= v) maps ids at v to ids at u.
struct Presheaf {
  const contexts::ContextPoset* W = nullptr;
  std::vector<int> stage;
  std::vector<std::vector<std::vector<int>>> restr;

  int map(int v, int u, int e) const { return restr[v][u][e]; }
  bool functorial() const;
  bool same_shape(const Presheaf& other) const;
};

// Sieve on a context: a down-closed set of subcontexts of `at`.
struct Sieve {
  int at = -1;
  IdSet members;
};

bool is_sieve(const contexts::ContextPoset& w, const Sieve& s);
Sieve full_sieve(const contexts::ContextPoset& w, int v);
Sieve empty_sieve(const contexts::ContextPoset& w, int v);
Sieve restrict_sieve(const contexts::ContextPoset& w, const Sieve& s, int u);

// The quantization-induced local operator: j(s) = {u <= at : flat(u) in s}.
Sieve apply_j(const contexts::ContextPoset& w, const Sieve& s);

// Subobject-classifier presheaf: stage at v enumerates all sieves on v.
struct OmegaData {
  Presheaf pshf;
  std::vector<std::vector<IdSet>> sieves;  // per stage, per element id
  std::vector<std::map<IdSet, int>> index;

  int id_of(int v, const IdSet& members) const;
  const IdSet& sieve_of(int v, int e) const { return sieves[v][e]; }
};

OmegaData build_omega(const contexts::ContextPoset& w);
// Stages restricted to the j-closed sieves; asserts the stage equals the
// fixed points of j at each context.
OmegaData build_omega_j(const contexts::ContextPoset& w);

bool sieve_j_closed(const contexts::ContextPoset& w, const Sieve& s);

struct Subpresheaf {
  const Presheaf* Q = nullptr;
  std::vector<IdSet> elems;  // per stage

  bool valid() const;  // closed under restrictions
  bool full() const;
  int count() const;
};

Subpresheaf full_subpresheaf(const Presheaf& q);
// Closure of a subobject under j: stage v keeps the elements whose
// restriction to flat(v) lies in the subobject.
Subpresheaf closure_j(const Subpresheaf& s);
bool is_dense(const Subpresheaf& s);
bool is_closed(const Subpresheaf& s);

// Direct image along flat: stage at v is Q(flat(v)).  Ids are shared with Q.
Presheaf sheafify(const Presheaf& q);
// Down-restriction: stages vanish outside the principal downset of v.
Presheaf down_restrict(const Presheaf& q, int v);
// Subobject of sheafify(*s.Q) induced by a subobject of Q.
Subpresheaf sheafify_sub(const Subpresheaf& s, const Presheaf& flat_q);

struct NatTransform {
  const Presheaf* src = nullptr;
  const Presheaf* dst = nullptr;
  std::vector<std::vector<int>> comp;  // -1 where undefined

  bool total() const;
  bool natural() const;  // squares commute wherever defined
  bool defined_on(const Subpresheaf& s) const;
};

// Canonical comparison Q -> sheafify(Q), componentwise restriction to flat.
NatTransform zeta(const Presheaf& q, const Presheaf& flat_q);
// A presheaf is a j-sheaf iff every zeta component is a bijection.
bool is_sheaf(const Presheaf& q);

// Unique extension of lambda: S -> R along the dense inclusion S >-> Q,
// for R a sheaf.  lambda must be natural and defined exactly on S.
// Throws NotDense / NotSheaf.  With verify_unique, exhaustively checks that
// exactly one natural extension exists (guarded).
NatTransform extend_along_dense(const Presheaf& q, const Subpresheaf& s,
                                const Presheaf& r, const NatTransform& lambda,
                                bool verify_unique = false,
                                long long guard = 2000000);
// All natural transformations Q -> R agreeing with lambda where defined.
std::vector<NatTransform> enumerate_extensions(const Presheaf& q,
                                               const Presheaf& r,
                                               const NatTransform& lambda,
                                               long long guard = 2000000);

// Epi-mono factorization of j: the retraction Omega -> Omega_j.
NatTransform retraction_r(const OmegaData& omega, const OmegaData& omega_j);

// Global element of Omega (equivalently a compatible family of sieves,
// equivalently a down-closed set of contexts).
struct TruthValue {
  const contexts::ContextPoset* W = nullptr;
  IdSet down;

  Sieve at(int v) const;
  bool omega_j_valued() const;  // flat(v) in down implies v in down
  bool operator==(const TruthValue& o) const { return down == o.down; }
  bool leq(const TruthValue& o) const { return down.subset_of(o.down); }
};

TruthValue truth_value_from_downset(const contexts::ContextPoset& w,
                                    const IdSet& down);
TruthValue truth_value_from_family(const contexts::ContextPoset& w,
                                   const std::vector<Sieve>& family);
TruthValue tv_meet(const TruthValue& a, const TruthValue& b);
TruthValue tv_join(const TruthValue& a, const TruthValue& b);
TruthValue true_j(const contexts::ContextPoset& w);

// All global elements of Omega / Omega_j via the downset characterization.
std::vector<TruthValue> gamma_omega(const contexts::ContextPoset& w,
                                    long long guard = 2000000);
std::vector<TruthValue> gamma_omega_j(const contexts::ContextPoset& w,
                                      long long guard = 2000000);

// Generic global-element enumeration for arbitrary presheaves (one id per
// stage, compatible with all restrictions).  Throws SizeLimit past guard.
std::vector<std::vector<int>> global_elements(const Presheaf& q,
                                              long long guard = 2000000);

// All down-closed subsets of the poset.
std::vector<IdSet> all_downsets(const contexts::ContextPoset& w,
                                long long guard = 2000000);

// All subobjects of q (restriction-closed stagewise subsets); optionally
// only the j-closed ones.  Throws SizeLimit past guard.
std::vector<Subpresheaf> enumerate_subpresheaves(const Presheaf& q,
                                                 bool closed_only,
                                                 long long guard = 2000000);

}  // namespace qtopos::presheaves
