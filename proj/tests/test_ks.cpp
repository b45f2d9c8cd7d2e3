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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "qtopos/fixtures.hpp"

using namespace qtopos;
using contexts::ContextPoset;
using ks::KSOptions;
using ks::KSResult;
using ks::Ray;

namespace {

std::vector<std::vector<bool>> adj_of(int n,
                                      std::initializer_list<std::pair<int, int>>
                                          edges) {
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (auto [a, b] : edges) {
    adj[a][b] = true;
    adj[b][a] = true;
  }
  return adj;
}

double ray_dot(const Ray& a, const Ray& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<std::vector<bool>> orthogonality_graph(
    const std::vector<Ray>& rays) {
  const int n = static_cast<int>(rays.size());
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      const double cos = std::abs(ray_dot(rays[i], rays[k])) /
                         std::sqrt(ray_dot(rays[i], rays[i]) *
                                   ray_dot(rays[k], rays[k]));
      adj[i][k] = adj[k][i] = cos < 1e-9;
    }
  return adj;
}

}  // namespace

TEST_CASE("maximal cliques of small graphs, by hand") {
  using VV = std::vector<std::vector<int>>;
  CHECK(ks::maximal_cliques(adj_of(3, {{0, 1}, {1, 2}, {0, 2}})) ==
        VV{{0, 1, 2}});
  CHECK(ks::maximal_cliques(adj_of(3, {{0, 1}, {1, 2}})) == VV{{0, 1}, {1, 2}});
  CHECK(ks::maximal_cliques(adj_of(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}})) ==
        VV{{0, 1}, {0, 3}, {1, 2}, {2, 3}});
  CHECK(ks::maximal_cliques(adj_of(3, {})) == VV{{0}, {1}, {2}});
  CHECK(ks::maximal_cliques(adj_of(
            4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}})) ==
        VV{{0, 1, 2}, {0, 1, 3}});
}

TEST_CASE("ray families have the advertised shapes") {
  auto peres = ks::peres33_rays();
  CHECK(peres.size() == 33);
  for (const Ray& r : peres) CHECK(r.size() == 3);

  auto cabello = ks::cabello18_rays();
  CHECK(cabello.size() == 18);
  for (const Ray& r : cabello) CHECK(r.size() == 4);

  // projective deduplication: no two rays are parallel
  for (const auto& rays : {peres, cabello})
    for (size_t i = 0; i < rays.size(); ++i)
      for (size_t k = i + 1; k < rays.size(); ++k) {
        const double cos = std::abs(ray_dot(rays[i], rays[k])) /
                           std::sqrt(ray_dot(rays[i], rays[i]) *
                                     ray_dot(rays[k], rays[k]));
        CHECK(cos < 1 - 1e-9);
      }

  auto axes = ks::axis_rays(4);
  CHECK(axes.size() == 4);
  for (size_t i = 0; i < axes.size(); ++i)
    for (size_t k = 0; k < axes.size(); ++k)
      CHECK(ray_dot(axes[i], axes[k]) == (i == k ? 1.0 : 0.0));
}

TEST_CASE("orthogonality structure of the fixed ray families") {
  auto count_bases = [](const std::vector<Ray>& rays, int dim, int* cliques) {
    auto cl = ks::maximal_cliques(orthogonality_graph(rays));
    *cliques = static_cast<int>(cl.size());
    int full = 0;
    for (const auto& c : cl)
      if (static_cast<int>(c.size()) == dim) ++full;
    return full;
  };
  int cliques = 0;
  CHECK(count_bases(ks::peres33_rays(), 3, &cliques) == 16);
  CHECK(cliques == 40);
  auto cabello = ks::cabello18_rays();
  CHECK(count_bases(cabello, 4, &cliques) == 9);
  CHECK(cliques == 24);
  // each of the 18 rays lies in exactly two of the nine bases
  auto cl = ks::maximal_cliques(orthogonality_graph(cabello));
  std::vector<int> uses(cabello.size(), 0);
  for (const auto& c : cl)
    if (c.size() == 4)
      for (int v : c) ++uses[v];
  for (int u : uses) CHECK(u == 2);
}

TEST_CASE("ray posets of a single basis") {
  for (int dim : {2, 3, 4}) {
    // the basis context plus the always-present scalar bottom
    ContextPoset w = ks::ray_poset(ks::axis_rays(dim), dim);
    CHECK(w.size() == 2);
    KSResult res = ks::ks_check_rays("axes", ks::axis_rays(dim), dim);
    CHECK(res.dim == dim);
    CHECK(res.n_rays == dim);
    CHECK(res.n_bases == 1);
    CHECK(res.n_cliques == 1);
    CHECK(res.n_contexts == 2);
    CHECK(res.sections == dim);
  }
}

TEST_CASE("two bases sharing a ray meet in a two-point context") {
  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<Ray> rays = {
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, s, s}, {0, s, -s}};
  ContextPoset w = ks::ray_poset(rays, 3);
  CHECK(w.size() == 4);
  int n2 = 0, n3 = 0;
  for (int v = 0; v < w.size(); ++v) {
    const int r = w.ctxs[v].n_min();
    if (r == 2) ++n2;
    if (r == 3) ++n3;
  }
  CHECK(n2 == 1);
  CHECK(n3 == 2);
  for (int v = 0; v < w.size(); ++v) CHECK(w.flat(v) == v);

  KSResult res = ks::ks_check_rays("shared", rays, 3);
  CHECK(res.n_rays == 5);
  CHECK(res.n_bases == 2);
  CHECK(res.n_cliques == 2);
  CHECK(res.n_contexts == 4);
  // one section pins the shared ray everywhere, two free picks remain in
  // each arm otherwise
  CHECK(res.sections == 5);
}

TEST_CASE("ray input is deduplicated projectively") {
  const std::vector<Ray> rays = {
      {1, 0}, {0, 1}, {0, 2}, {0, -1}, {-3, 0}};
  KSResult res = ks::ks_check_rays("dup", rays, 2);
  CHECK(res.n_rays == 2);
  CHECK(res.n_contexts == 2);
  CHECK(res.sections == 2);
}

TEST_CASE("malformed rays are rejected") {
  CHECK_THROWS_AS(ks::ray_poset({{1, 0, 0}, {0, 1}}, 3), InvalidInput);
  CHECK_THROWS_AS(ks::ray_poset({{1, 0, 0}, {0, 0, 0}}, 3), InvalidInput);
  CHECK_THROWS_AS(ks::ray_poset({}, 3), InvalidInput);
}

TEST_CASE("the context budget gates large ray posets") {
  KSOptions opts;
  opts.max_contexts = 10;
  CHECK_THROWS_AS(ks::ray_poset(ks::peres33_rays(), 3, opts), SizeLimit);
}

TEST_CASE("no sections survive over the contextuality ray families") {
  for (Exec mode : {Exec::Serial, Exec::Parallel}) {
    KSOptions opts;
    opts.mode = mode;
    KSResult peres = ks::ks_check_rays("peres33", ks::peres33_rays(), 3, opts);
    CHECK(peres.dim == 3);
    CHECK(peres.n_rays == 33);
    CHECK(peres.n_bases == 16);
    CHECK(peres.n_cliques == 40);
    CHECK(peres.n_contexts == 74);
    CHECK(peres.sections == 0);

    KSResult cab = ks::ks_check_rays("cabello18", ks::cabello18_rays(), 4,
                                     opts);
    CHECK(cab.dim == 4);
    CHECK(cab.n_rays == 18);
    CHECK(cab.n_bases == 9);
    CHECK(cab.n_cliques == 24);
    CHECK(cab.n_contexts == 70);
    CHECK(cab.sections == 0);
  }
}

TEST_CASE("section counts agree with global element enumeration") {
  for (const auto& fx :
       {fixtures::fixture_a(), fixtures::fixture_b(), fixtures::fixture_c()}) {
    ContextPoset w = fixtures::build_fixture(fx);
    spectral::SpectralData sd = spectral::build_spectral(w);
    presheaves::Presheaf flat_sigma = presheaves::sheafify(sd.sigma);
    presheaves::OmegaData omega = presheaves::build_omega(w);
    for (const presheaves::Presheaf* q :
         {&sd.sigma, &flat_sigma, &omega.pshf}) {
      const long long want =
          static_cast<long long>(presheaves::global_elements(*q).size());
      CHECK(ks::count_sections(*q, Exec::Serial) == want);
      CHECK(ks::count_sections(*q, Exec::Parallel) == want);
    }
  }
}

TEST_CASE("section counting respects the exploration budget") {
  ContextPoset w = fixtures::build_fixture(fixtures::fixture_a());
  spectral::SpectralData sd = spectral::build_spectral(w);
  CHECK_THROWS_AS(ks::count_sections(sd.sigma, Exec::Serial, 2), SizeLimit);
}

TEST_CASE("section counts over prebuilt posets") {
  ContextPoset single = fixtures::build_fixture(fixtures::trivial_fixture());
  spectral::SpectralData ssd = spectral::build_spectral(single);
  CHECK(ks::ks_check_poset("single", ssd).sections == 2);

  ContextPoset qubit = fixtures::build_fixture(fixtures::fixture_a());
  spectral::SpectralData qsd = spectral::build_spectral(qubit);
  CHECK(ks::ks_check_poset("qubit", qsd).sections == 2);

  ContextPoset qutrit = fixtures::build_fixture(fixtures::fixture_c());
  spectral::SpectralData csd = spectral::build_spectral(qutrit);
  KSResult res = ks::ks_check_poset("qutrit", csd);
  CHECK(res.sections == 3);
  CHECK(res.n_contexts == 3);
}
