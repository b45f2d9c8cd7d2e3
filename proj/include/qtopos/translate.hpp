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

#include "qtopos/parallel.hpp"
#include "qtopos/truth.hpp"

namespace qtopos::translate {

using presheaves::TruthValue;
using spectral::DBSubobject;
using spectral::Flavor;
using spectral::SpectralData;
using truth::LocalDB;
using truth::TruthObject;
using truth::TruthPresheafM;

// --- truth values ---

// Pullback along flat: {v : flat(v) in down}; lands in the closed classifier.
TruthValue flat_preimage_tv(const contexts::ContextPoset& w,
                            const TruthValue& tv);
// A global element of the full classifier translates a closed one when its
// flat-preimage equals it.
bool is_translation_tv(const contexts::ContextPoset& w, const TruthValue& nu,
                       const TruthValue& nu_j);
// Largest / smallest translations of a closed truth value.
TruthValue gamma_max(const contexts::ContextPoset& w, const TruthValue& nu_j);
TruthValue gamma_min(const contexts::ContextPoset& w, const TruthValue& nu_j);

// --- principal-downset propositions ---

// Direct image along flat of a stagewise-principal subobject.
DBSubobject sheaf_image_prop(const SpectralData& sd, const DBSubobject& p);
bool is_translation_prop(const SpectralData& sd, const DBSubobject& p,
                         const DBSubobject& p_j);
DBSubobject iota_max(const SpectralData& sd, const DBSubobject& p_j);
DBSubobject iota_min(const SpectralData& sd, const DBSubobject& p_j);

// All stagewise-principal subobjects of the outer presheaf of a flavor.
std::vector<DBSubobject> enumerate_db_subobjects(const SpectralData& sd,
                                                 Flavor flavor,
                                                 long long guard = 2000000);

// --- locals and truth objects ---

// Image of a presheaf-flavor local under restriction to flat stages, as a
// sheaf-flavor local below v (v = truth::kGlobal for the whole poset).
// Requires flat(u) to lie in the domain of `a` for every u below v.
LocalDB sheaf_image_local(const SpectralData& sd, const LocalDB& a, int v);

// General power-object comparison at stage v: a subobject s of q supported
// below flat(v) maps to its flat image, a closed subobject of flat_q
// supported below v.
presheaves::Subpresheaf varrho_sub(const presheaves::Presheaf& q,
                                   const presheaves::Presheaf& flat_q,
                                   const presheaves::Subpresheaf& s, int v);

// Pullback of the stages of a sheaf-flavor truth object along the flat
// image: member(v, a) with a a presheaf local below flat(v).
std::function<bool(int, const LocalDB&)> truth_preimage(
    const SpectralData& sd, const TruthObject& t_j);

// Smallest filter containing r inside the locals below `at`; empty input
// generates the empty filter.
struct GeneratedFilter {
  bool empty = true;
  LocalDB gen;
};
GeneratedFilter filter_generate(const SpectralData& sd, Flavor flavor, int at,
                                const std::vector<LocalDB>& r);

// Translation test for truth objects: at every stage V and for every
// presheaf local A below flat(V), membership of A in t at flat(V) must
// agree with membership of the image local in t_j at V.
bool is_translation_truth(const SpectralData& sd, const TruthObject& t,
                          const TruthObject& t_j, long long guard = 2000000);
bool is_translation_truth_m(const SpectralData& sd, const TruthPresheafM& t,
                            const TruthPresheafM& t_j,
                            long long guard = 2000000);

// Largest / smallest translations of a (materialized) closed truth object.
TruthPresheafM jmath_max_m(const SpectralData& sd, const TruthPresheafM& t_j,
                           long long guard = 2000000);
TruthPresheafM jmath_min_m(const SpectralData& sd, const TruthPresheafM& t_j,
                           long long guard = 2000000);
TruthObject jmath_max(const SpectralData& sd, const TruthObject& t_j,
                      long long guard = 2000000);
TruthObject jmath_min(const SpectralData& sd, const TruthObject& t_j,
                      long long guard = 2000000);

// The unique candidate truth sheaf that t could translate: stagewise image
// of the stage at flat(V) under the restriction-to-flat map.
TruthPresheafM translation_candidate(const SpectralData& sd,
                                     const TruthPresheafM& t);
// Whether t translates some truth sheaf (namely its candidate).
bool is_translation_of_some(const SpectralData& sd, const TruthPresheafM& t,
                            long long guard = 2000000);

// --- cross-checks ---

// The truth value against t_j equals the flat preimage of the truth value
// against t.
bool verify_nu_relation(const SpectralData& sd, const DBSubobject& p,
                        const TruthObject& t, const DBSubobject& p_j,
                        const TruthObject& t_j);
// The truth value of a proposition, evaluated stagewise, reproduces the
// sieve assigned by tau to the restricted proposition.
bool nu_tau_consistent(const SpectralData& sd, const DBSubobject& p,
                       const TruthObject& t);
// Stagewise diagram equality: for every stage V, local a below flat(V) and
// subcontext u of flat(V), membership of the restricted local in t at
// flat(u) agrees with membership of its flat image in t_j at u.
bool diagram_commutes(const SpectralData& sd, const TruthObject& t,
                      const TruthObject& t_j, long long guard = 2000000);

// --- exhaustive verifiers ---

struct Clause {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string title;
  bool pass = false;
  std::vector<Clause> clauses;
  std::vector<std::pair<std::string, long long>> counts;

  void add(const std::string& name, bool ok, const std::string& detail = "");
};

// Fibers of the classifier retraction are nonempty lattice intervals with
// the stated extremes.
Report verify_truth_value_classes(const contexts::ContextPoset& w,
                                  Exec mode = Exec::Serial,
                                  long long guard = 2000000);
// Fibers of the flat image on principal subobjects of the outer presheaf.
Report verify_proposition_classes(const SpectralData& sd,
                                  Exec mode = Exec::Serial,
                                  long long guard = 2000000);
// Fibers of the translation relation on truth presheaves, against a list
// of sampled truth sheaves; also reports whether some truth presheaf
// translates no truth sheaf at all.
Report verify_truth_object_classes(const SpectralData& sd,
                                   const std::vector<TruthPresheafM>& samples,
                                   Exec mode = Exec::Serial,
                                   long long guard = 2000000);

}  // namespace qtopos::translate
