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

#include <functional>
#include <optional>

#include "qtopos/spectral.hpp"

namespace qtopos::truth {

using spectral::Flavor;
using spectral::Mask;
using spectral::SpectralData;

inline constexpr int kGlobal = -1;

// An element of the principal-downset subobject lattice of the outer
// presheaf restricted below `at` (at = kGlobal: over the whole poset).
// For the sheaf flavor the mask at v is over the minimal projections of
// flat(v) and satisfies top[v] == top[flat(v)].
struct LocalDB {
  Flavor flavor = Flavor::Presheaf;
  int at = kGlobal;
  std::vector<Mask> top;

  bool operator==(const LocalDB& o) const {
    return flavor == o.flavor && at == o.at && top == o.top;
  }
  bool operator<(const LocalDB& o) const { return top < o.top; }
};

IdSet local_domain(const SpectralData& sd, int at);
bool local_db_valid(const SpectralData& sd, const LocalDB& a);
// Stage masking to the downset of u (u inside the current domain).
LocalDB restrict_local(const SpectralData& sd, const LocalDB& a, int u);
bool local_leq(const SpectralData& sd, const LocalDB& a, const LocalDB& b);
LocalDB local_meet(const SpectralData& sd, const LocalDB& a, const LocalDB& b);
LocalDB local_join(const SpectralData& sd, const LocalDB& a, const LocalDB& b);
LocalDB local_top(const SpectralData& sd, Flavor flavor, int at);

// All valid locals below `at` of the given flavor.  Deterministic order.
std::vector<LocalDB> enumerate_local_db(const SpectralData& sd, Flavor flavor,
                                        int at, long long guard = 2000000);

// Stagewise-filter subobject of the power object of the outer presheaf
// (or of its sheafification), given by a membership predicate on locals.
struct TruthObject {
  Flavor flavor = Flavor::Presheaf;
  std::string tag;
  std::function<bool(const LocalDB&)> member;  // input's `at` names the stage
};

// Stage at V: locals whose top at every subcontext has rho-trace at least
// r (traces compared with slack eps).
TruthObject truth_rho_r(const SpectralData& sd, const linops::Mat& rho,
                        double r, Flavor flavor, double eps = kDefaultEps);
// Stage at V: locals whose stagewise join dominates |phi><phi|.
TruthObject truth_vector(const SpectralData& sd, const linops::Vec& phi,
                         Flavor flavor, double eps = kDefaultEps);

// The sieve {u <= s.at : s restricted to u is a member of the stage at u}.
// Throws NotFilter if the result is not a sieve (or, for the sheaf flavor,
// not j-closed).
presheaves::Sieve tau(const SpectralData& sd, const TruthObject& t,
                      const LocalDB& s);
std::function<presheaves::Sieve(const LocalDB&)> tau_char(
    const SpectralData& sd, const TruthObject& t);

// Truth value of a proposition: the downset of contexts where the
// restricted proposition is a member of the truth object.
presheaves::TruthValue nu(const SpectralData& sd, const spectral::DBSubobject& p,
                          const TruthObject& t);

// Closed forms for daseinized projections, cross-checkable against nu.
presheaves::TruthValue nu_projection_fast(const SpectralData& sd,
                                          const linops::Mat& p_hat,
                                          const linops::Mat& rho, double r,
                                          Flavor flavor,
                                          double eps = kDefaultEps);
presheaves::TruthValue nu_vector_fast(const SpectralData& sd,
                                      const linops::Mat& p_hat,
                                      const linops::Vec& phi, Flavor flavor,
                                      double eps = kDefaultEps);

// Guarded materialization of one stage.
std::vector<LocalDB> materialize_stage(const SpectralData& sd,
                                       const TruthObject& t, int at,
                                       long long guard = 2000000);

bool stage_upward_closed(const SpectralData& sd, const TruthObject& t, int at,
                         long long guard = 2000000);
bool stage_is_filter(const SpectralData& sd, const TruthObject& t, int at,
                     long long guard = 2000000);
// Restriction-closedness of all stages.
bool truth_is_presheaf(const SpectralData& sd, const TruthObject& t,
                       long long guard = 2000000);
// Presheaf + stagewise bijectivity of the comparison with the flat stage.
bool truth_is_sheaf(const SpectralData& sd, const TruthObject& t,
                    long long guard = 2000000);

// Materialized truth presheaf: every stage is empty or the principal filter
// at gen[v] (in the finite stage lattices every filter is principal).
struct TruthPresheafM {
  Flavor flavor = Flavor::Presheaf;
  std::vector<std::optional<LocalDB>> gen;  // nullopt: empty stage

  bool member(const SpectralData& sd, const LocalDB& a) const {
    const auto& g = gen[a.at];
    return g.has_value() && local_leq(sd, *g, a);
  }
};

// Materializes a predicate-backed truth object; throws NotFilter if some
// stage is not a filter.
TruthPresheafM materialize_truth(const SpectralData& sd, const TruthObject& t,
                                 long long guard = 2000000);
TruthObject as_truth_object(const SpectralData& sd, const TruthPresheafM& m,
                            const std::string& tag);
bool truth_m_valid(const SpectralData& sd, const TruthPresheafM& m);

// All truth presheaves of the given flavor (guarded).
std::vector<TruthPresheafM> enumerate_truth_presheaves(
    const SpectralData& sd, Flavor flavor, long long guard = 2000000);

// The truth presheaf whose stage at V is the principal filter generated by
// the restriction of p below V.
TruthPresheafM principal_truth(const SpectralData& sd,
                               const spectral::DBSubobject& p);

}  // namespace qtopos::truth
