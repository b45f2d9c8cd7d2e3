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

#include "qtopos/fixtures.hpp"

#include <string>

namespace qtopos::fixtures {

using linops::Mat;

namespace {

Mat diag(const std::vector<double>& d) {
  Mat m = Mat::Zero(d.size(), d.size());
  for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat sigma_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Mat sigma_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

}  // namespace

Fixture fixture_a() {
  Fixture f;
  f.name = "qubit_zx";
  f.dim = 2;
  f.observables = {{"a", sigma_z()}};
  f.seeds = {{"Vx", {sigma_x()}}};
  return f;
}

Fixture fixture_b() {
  Fixture f;
  f.name = "chain5";
  f.dim = 5;
  f.observables = {{"a", diag({0, 1, 2, 2, 2})}};
  f.seeds = {{"V1", {diag({1, 2, 3, 4, 5})}},
             {"V2", {diag({1, 2, 3, 4, 4})}},
             {"V3", {diag({1, 2, 3, 2, 3})}}};
  return f;
}

Fixture fixture_c() {
  Fixture f;
  f.name = "qutrit_chain";
  f.dim = 3;
  f.observables = {{"a", diag({0, 1, 2})}};
  f.seeds = {{"Vc", {diag({0, 1, 1})}}};
  return f;
}

Fixture trivial_fixture() {
  Fixture f;
  f.name = "single";
  f.dim = 2;
  f.observables = {{"a", sigma_z()}};
  return f;
}

namespace {

Mat random_unitary(int dim, Rng& rng) {
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      g(i, j) = linops::Cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return Eigen::HouseholderQR<Mat>(g).householderQ();
}

Mat random_degenerate(int dim, Rng& rng) {
  std::vector<double> evs(dim);
  for (double& e : evs) e = static_cast<double>(rng.next_u64() % 3);
  Mat u = random_unitary(dim, rng);
  return u * diag(evs) * u.adjoint();
}

}  // namespace

Fixture random_fixture(uint64_t seed) {
  for (uint64_t attempt = 0; attempt < 20; ++attempt) {
    Rng rng(seed + attempt * 1000003ull);
    const int dim = 2 + static_cast<int>(rng.next_u64() % 3);
    Fixture f;
    f.name = "rand" + std::to_string(seed);
    f.dim = dim;
    f.observables = {{"a", random_degenerate(dim, rng)},
                     {"b", random_degenerate(dim, rng)}};
    f.seeds = {{"S", {random_degenerate(dim, rng)}}};
    f.options.max_contexts = 12;
    f.options.seed = seed;
    try {
      build_fixture(f);
      return f;
    } catch (const SizeLimit&) {
      continue;
    }
  }
  throw Error("random fixture generation failed to stay within 12 contexts");
}

contexts::ContextPoset build_fixture(const Fixture& f) {
  return contexts::build_poset(f.dim, f.observables, f.seeds, f.options);
}

}  // namespace qtopos::fixtures
