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
#include <vector>

#include "qtopos/parallel.hpp"
#include "qtopos/spectral.hpp"

namespace qtopos::ks {

// A ray: real coordinates of a nonzero vector, up to scale and sign.
using Ray = std::vector<double>;

// The 33 rays in dimension 3 built from signed permutations of
// (0,0,1), (0,1,1), (0,1,sqrt 2), (1,1,sqrt 2), deduplicated projectively.
std::vector<Ray> peres33_rays();
// The 18 rays in dimension 4 forming 9 orthogonal bases, each ray shared
// by exactly two bases.
std::vector<Ray> cabello18_rays();
// The standard basis of R^dim (a single full context).
std::vector<Ray> axis_rays(int dim);

struct KSOptions {
  double eps = kDefaultEps;
  int max_contexts = 512;
  long long guard = 50000000;
  uint64_t seed = 12345;
  Exec mode = Exec::Serial;
};

struct KSResult {
  std::string name;
  int dim = 0;
  int n_rays = 0;      // distinct rays after projective deduplication
  int n_bases = 0;     // maximal orthogonality cliques of full size dim
  int n_cliques = 0;   // all maximal orthogonality cliques
  int n_contexts = 0;  // contexts in the generated poset
  long long sections = 0;  // global elements of the sheafified spectral presheaf
};

// Maximal cliques of an undirected graph (Bron-Kerbosch with pivoting),
// sorted by their vertex lists.
std::vector<std::vector<int>> maximal_cliques(
    const std::vector<std::vector<bool>>& adj);

// Context poset generated by a ray set: the maximal orthogonality cliques
// seed the contexts, the poset closes under pairwise intersection, and
// flat(V) is the algebra generated by the rays lying in V (extending the
// poset when needed so that every flat image is present).  Throws
// InvalidInput on malformed rays, SizeLimit past max_contexts.
contexts::ContextPoset ray_poset(const std::vector<Ray>& rays, int dim,
                                 const KSOptions& opts = {});

// Number of global elements of a presheaf, by depth-first search with
// forced propagation along restrictions.  The parallel mode expands a
// deterministic prefix frontier and sums per-prefix counts; both modes
// throw SizeLimit when the explored-node budget is exceeded.
long long count_sections(const presheaves::Presheaf& q,
                         Exec mode = Exec::Serial, long long guard = 50000000);

// Builds the ray poset and counts the global elements of the sheafified
// spectral presheaf over it.
KSResult ks_check_rays(const std::string& name, const std::vector<Ray>& rays,
                       int dim, const KSOptions& opts = {});
// The same count over an already-built spectral structure.
KSResult ks_check_poset(const std::string& name,
                        const spectral::SpectralData& sd,
                        Exec mode = Exec::Serial, long long guard = 50000000);

}  // namespace qtopos::ks
