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

#include "qtopos/presheaves.hpp"

namespace qtopos::spectral {

// Whether a structure lives over the raw context poset or over its image
// under the flat-induced sheafification.
enum class Flavor { Presheaf, Sheaf };

// Subset of the minimal projections of a context, encoding an element of
// its projection lattice (or a set of its Gelfand characters).
using Mask = uint32_t;

// The spectral presheaf (stages: characters, indexed by minimal
// projections) and the outer presheaf (stages: projection lattices encoded
// as masks, restriction = daseinization).
struct SpectralData {
  const contexts::ContextPoset* W = nullptr;
  double eps = kDefaultEps;
  presheaves::Presheaf sigma;
  presheaves::Presheaf outer;

  linops::Mat proj_of_mask(int v, Mask m) const;
  // Mask of a projection that lies in the lattice of v; InvalidInput else.
  Mask mask_of_proj(int v, const linops::Mat& p) const;
  // Overlap daseinization of an arbitrary ambient projection into v.
  Mask daseinize_mask(const linops::Mat& p, int v) const;
  // Table-based daseinization of a lattice element of `from` into u <= from.
  Mask restrict_mask(int from, int u, Mask m) const {
    return static_cast<Mask>(outer.restr[from][u][m]);
  }
  int n_min(int v) const { return W->ctxs[v].n_min(); }
};

SpectralData build_spectral(const contexts::ContextPoset& w,
                            double eps = kDefaultEps);

// Outer daseinization: the smallest projection of the context dominating p.
linops::Mat daseinize(const SpectralData& sd, const linops::Mat& p, int v);
// Its sheaf form: daseinization into flat(v).
linops::Mat daseinize_j(const SpectralData& sd, const linops::Mat& p, int v);

// Characters valuing a lattice projection of v at 1.
Mask alpha(const SpectralData& sd, int v, const linops::Mat& p);

// A subobject of the outer presheaf whose stages are principal downsets;
// stored via the stagewise top projection.  For the sheaf flavor the mask
// at v is over the minimal projections of flat(v).
struct DBSubobject {
  Flavor flavor = Flavor::Presheaf;
  std::vector<Mask> top;
};

// A family of lattice projections whose coarse-grainings dominate each
// other along restrictions; same storage as DBSubobject.
struct HyperElement {
  Flavor flavor = Flavor::Presheaf;
  std::vector<Mask> h;
};

// A restriction-closed family of character sets (clopen subobject of the
// spectral presheaf or of its sheafification).
struct ClopenSubobject {
  Flavor flavor = Flavor::Presheaf;
  std::vector<Mask> chars;
};

bool is_hyper(const SpectralData& sd, const HyperElement& h);
bool is_db(const SpectralData& sd, const DBSubobject& a);
bool is_clopen(const SpectralData& sd, const ClopenSubobject& s);

// The three bijections (stage tops / hyper families / character sets) and
// their composites.  Each validates its input and output.
HyperElement hyper_of_db(const SpectralData& sd, const DBSubobject& a);
DBSubobject db_of_hyper(const SpectralData& sd, const HyperElement& h);
ClopenSubobject clopen_of_hyper(const SpectralData& sd, const HyperElement& h);
HyperElement hyper_of_clopen(const SpectralData& sd, const ClopenSubobject& s);
ClopenSubobject clopen_of_db(const SpectralData& sd, const DBSubobject& a);
DBSubobject db_of_clopen(const SpectralData& sd, const ClopenSubobject& s);

// Stagewise daseinization of an ambient projection, as a principal-downset
// subobject of the outer presheaf (or its sheafification).
DBSubobject proposition_of(const SpectralData& sd, const linops::Mat& p_hat,
                           Flavor flavor);

}  // namespace qtopos::spectral
