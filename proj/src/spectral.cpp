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

#include "qtopos/spectral.hpp"

namespace qtopos::spectral {

using contexts::ContextPoset;
using linops::Mat;

linops::Mat SpectralData::proj_of_mask(int v, Mask m) const {
  const auto& minimal = W->ctxs[v].minimal;
  Mat p = Mat::Zero(W->dim, W->dim);
  for (size_t i = 0; i < minimal.size(); ++i)
    if (m & (Mask{1} << i)) p += minimal[i];
  return p;
}

Mask SpectralData::mask_of_proj(int v, const Mat& p) const {
  linops::validate_projection(p, 1e-8);
  Mask m = daseinize_mask(p, v);
  if (linops::frob_norm(Mat(proj_of_mask(v, m) - p)) > 1e-7)
    throw InvalidInput("projection does not belong to the context lattice");
  return m;
}

Mask SpectralData::daseinize_mask(const Mat& p, int v) const {
  const auto& minimal = W->ctxs[v].minimal;
  Mask m = 0;
  for (size_t i = 0; i < minimal.size(); ++i)
    if (linops::frob_norm(Mat(minimal[i] * p)) > std::max(eps, 1e-9))
      m |= Mask{1} << i;
  return m;
}

SpectralData build_spectral(const ContextPoset& w, double eps) {
  SpectralData sd;
  sd.W = &w;
  sd.eps = eps;
  const int n = w.size();

  sd.sigma.W = &w;
  sd.sigma.stage.resize(n);
  sd.sigma.restr.assign(n, std::vector<std::vector<int>>(n));
  sd.outer.W = &w;
  sd.outer.stage.resize(n);
  sd.outer.restr.assign(n, std::vector<std::vector<int>>(n));

  for (int v = 0; v < n; ++v) {
    sd.sigma.stage[v] = w.ctxs[v].n_min();
    sd.outer.stage[v] = 1 << w.ctxs[v].n_min();
  }
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      if (!w.leq(u, v)) continue;
      const auto& ev = w.ctxs[v].minimal;
      const auto& fu = w.ctxs[u].minimal;
      // Character restriction: the unique minimal projection of u above e_i.
      std::vector<int> cr(ev.size(), -1);
      std::vector<Mask> overlap(fu.size(), 0);
      for (size_t j = 0; j < fu.size(); ++j)
        for (size_t i = 0; i < ev.size(); ++i)
          if (linops::frob_norm(Mat(fu[j] * ev[i])) > 1e-9) {
            overlap[j] |= Mask{1} << i;
            if (cr[i] != -1) throw Error("character restriction not unique");
            cr[i] = static_cast<int>(j);
          }
      for (size_t i = 0; i < ev.size(); ++i)
        if (cr[i] < 0) throw Error("character restriction undefined");
      sd.sigma.restr[v][u] = cr;

      std::vector<int>& dr = sd.outer.restr[v][u];
      dr.resize(size_t{1} << ev.size());
      for (Mask m = 0; m < (Mask{1} << ev.size()); ++m) {
        Mask img = 0;
        for (size_t j = 0; j < fu.size(); ++j)
          if (overlap[j] & m) img |= Mask{1} << j;
        dr[m] = static_cast<int>(img);
      }
    }
  return sd;
}

Mat daseinize(const SpectralData& sd, const Mat& p, int v) {
  linops::validate_projection(p, 1e-8);
  return sd.proj_of_mask(v, sd.daseinize_mask(p, v));
}

Mat daseinize_j(const SpectralData& sd, const Mat& p, int v) {
  return daseinize(sd, p, sd.W->flat(v));
}

Mask alpha(const SpectralData& sd, int v, const Mat& p) {
  return sd.mask_of_proj(v, p);
}

namespace {

int stage_ctx(const SpectralData& sd, Flavor flavor, int v) {
  return flavor == Flavor::Sheaf ? sd.W->flat(v) : v;
}

bool family_shape_ok(const SpectralData& sd, Flavor flavor,
                     const std::vector<Mask>& fam) {
  if (static_cast<int>(fam.size()) != sd.W->size()) return false;
  for (int v = 0; v < sd.W->size(); ++v)
    if (fam[v] >= (Mask{1} << sd.n_min(stage_ctx(sd, flavor, v)))) return false;
  return true;
}

}  // namespace

bool is_hyper(const SpectralData& sd, const HyperElement& h) {
  const ContextPoset& w = *sd.W;
  if (!family_shape_ok(sd, h.flavor, h.h)) return false;
  if (h.flavor == Flavor::Presheaf) {
    for (int v = 0; v < w.size(); ++v)
      for (int u : w.below(v).members()) {
        Mask img = sd.restrict_mask(v, u, h.h[v]);
        if ((img | h.h[u]) != h.h[u]) return false;
      }
    return true;
  }
  for (int v = 0; v < w.size(); ++v) {
    if (h.h[v] != h.h[w.flat(v)]) return false;
    for (int u : w.below(v).members()) {
      Mask img = sd.restrict_mask(w.flat(v), w.flat(u), h.h[v]);
      if ((img | h.h[u]) != h.h[u]) return false;
    }
  }
  return true;
}

bool is_db(const SpectralData& sd, const DBSubobject& a) {
  return is_hyper(sd, HyperElement{a.flavor, a.top});
}

bool is_clopen(const SpectralData& sd, const ClopenSubobject& s) {
  const ContextPoset& w = *sd.W;
  if (!family_shape_ok(sd, s.flavor, s.chars)) return false;
  for (int v = 0; v < w.size(); ++v) {
    int cv = stage_ctx(sd, s.flavor, v);
    if (s.flavor == Flavor::Sheaf && s.chars[v] != s.chars[w.flat(v)])
      return false;
    for (int u : w.below(v).members()) {
      int cu = stage_ctx(sd, s.flavor, u);
      for (int i = 0; i < sd.n_min(cv); ++i) {
        if (!(s.chars[v] & (Mask{1} << i))) continue;
        int j = sd.sigma.restr[cv][cu][i];
        if (!(s.chars[u] & (Mask{1} << j))) return false;
      }
    }
  }
  return true;
}

HyperElement hyper_of_db(const SpectralData& sd, const DBSubobject& a) {
  if (!is_db(sd, a)) throw InvalidInput("not a principal-downset subobject");
  return HyperElement{a.flavor, a.top};
}

DBSubobject db_of_hyper(const SpectralData& sd, const HyperElement& h) {
  if (!is_hyper(sd, h)) throw InvalidInput("not a hyper family");
  return DBSubobject{h.flavor, h.h};
}

ClopenSubobject clopen_of_hyper(const SpectralData& sd,
                                const HyperElement& h) {
  if (!is_hyper(sd, h)) throw InvalidInput("not a hyper family");
  ClopenSubobject s{h.flavor, h.h};
  if (!is_clopen(sd, s)) throw Error("hyper family gave a non-clopen image");
  return s;
}

HyperElement hyper_of_clopen(const SpectralData& sd,
                             const ClopenSubobject& s) {
  if (!is_clopen(sd, s)) throw InvalidInput("not a clopen subobject");
  HyperElement h{s.flavor, s.chars};
  if (!is_hyper(sd, h)) throw Error("clopen subobject gave a non-hyper image");
  return h;
}

ClopenSubobject clopen_of_db(const SpectralData& sd, const DBSubobject& a) {
  return clopen_of_hyper(sd, hyper_of_db(sd, a));
}

DBSubobject db_of_clopen(const SpectralData& sd, const ClopenSubobject& s) {
  return db_of_hyper(sd, hyper_of_clopen(sd, s));
}

DBSubobject proposition_of(const SpectralData& sd, const Mat& p_hat,
                           Flavor flavor) {
  linops::validate_projection(p_hat, 1e-8);
  const ContextPoset& w = *sd.W;
  DBSubobject a;
  a.flavor = flavor;
  a.top.resize(w.size());
  for (int v = 0; v < w.size(); ++v)
    a.top[v] = sd.daseinize_mask(p_hat, stage_ctx(sd, flavor, v));
  if (!is_db(sd, a)) throw Error("daseinized family is not a subobject");
  return a;
}

}  // namespace qtopos::spectral
