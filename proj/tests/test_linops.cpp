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

#include "qtopos/linops.hpp"

#include <complex>

#include "doctest.h"

using namespace qtopos;
using linops::Mat;
using linops::Vec;

namespace {

const std::complex<double> kI{0, 1};

Mat sigma_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat sigma_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Mat diag(const std::vector<double>& d) {
  Mat m = Mat::Zero(d.size(), d.size());
  for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat basis_projection(int dim, int k) {
  Mat m = Mat::Zero(dim, dim);
  m(k, k) = 1;
  return m;
}

Mat random_matrix(Rng& rng, int dim) {
  Mat m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      m(r, c) = std::complex<double>(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return m;
}

Mat random_hermitian(Rng& rng, int dim) {
  Mat g = random_matrix(rng, dim);
  return (g + g.adjoint().eval()) / 2;
}

Mat random_unitary(Rng& rng, int dim) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(rng, dim));
  return qr.householderQ();
}

}  // namespace

TEST_CASE("check_matrix accepts square finite matrices only") {
  CHECK_NOTHROW(linops::check_matrix(Mat::Identity(3, 3)));
  CHECK_NOTHROW(linops::check_matrix(Mat::Identity(2, 2), 2));
  CHECK_THROWS_AS(linops::check_matrix(Mat::Zero(2, 3)), InvalidInput);
  CHECK_THROWS_AS(linops::check_matrix(Mat::Identity(2, 2), 3), InvalidInput);
  CHECK_THROWS_AS(linops::check_matrix(Mat::Identity(17, 17)), InvalidInput);
  CHECK_THROWS_AS(linops::check_matrix(Mat::Zero(0, 0)), InvalidInput);
  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(linops::check_matrix(bad), InvalidInput);
}

TEST_CASE("frobenius norm and inner product") {
  CHECK(linops::frob_norm(Mat::Identity(4, 4)) == doctest::Approx(2.0));
  CHECK(linops::frob_norm(Mat::Zero(3, 3)) == doctest::Approx(0.0));
  Rng rng(7);
  Mat a = random_matrix(rng, 3), b = random_matrix(rng, 3);
  CHECK(std::abs(linops::frob_inner(a, b) -
                 std::conj(linops::frob_inner(b, a))) < 1e-12);
  CHECK(std::abs(linops::frob_inner(a, a).real() -
                 linops::frob_norm(a) * linops::frob_norm(a)) < 1e-12);
}

TEST_CASE("hermitian and projection predicates") {
  CHECK(linops::is_hermitian(sigma_x()));
  CHECK(linops::is_hermitian(sigma_z()));
  CHECK_FALSE(linops::is_hermitian(kI * sigma_z()));

  CHECK(linops::is_projection(basis_projection(2, 0)));
  CHECK(linops::is_projection(Mat::Identity(3, 3)));
  CHECK(linops::is_projection(Mat::Zero(3, 3)));
  CHECK_FALSE(linops::is_projection(0.5 * Mat::Identity(2, 2)));
  CHECK_FALSE(linops::is_projection(sigma_z()));

  Rng rng(11);
  Vec v(2);
  v << std::complex<double>(0.6, 0.3), std::complex<double>(0, -0.74);
  v.normalize();
  CHECK(linops::is_projection(v * v.adjoint()));
}

TEST_CASE("loewner order on projections") {
  const Mat p0 = basis_projection(3, 0);
  const Mat p1 = basis_projection(3, 1);
  const Mat id = Mat::Identity(3, 3);
  CHECK(linops::loewner_leq(p0, id));
  CHECK(linops::loewner_leq(p0, p0));
  CHECK(linops::loewner_leq(p0, p0 + p1));
  CHECK_FALSE(linops::loewner_leq(id, p0));
  CHECK_FALSE(linops::loewner_leq(p0, p1));
  CHECK(linops::loewner_leq(Mat::Zero(3, 3), p1));
}

TEST_CASE("validators throw on bad input") {
  CHECK_THROWS_AS(linops::validate_projection(0.3 * Mat::Identity(2, 2)),
                  InvalidInput);
  CHECK_NOTHROW(linops::validate_projection(basis_projection(4, 2)));
  CHECK_THROWS_AS(linops::validate_hermitian(kI * sigma_x()), InvalidInput);
  CHECK_NOTHROW(linops::validate_hermitian(sigma_x()));
  CHECK_THROWS_AS(linops::validate_density(sigma_z()), InvalidInput);
  CHECK_THROWS_AS(linops::validate_density(Mat::Identity(2, 2)), InvalidInput);
  CHECK_NOTHROW(linops::validate_density(0.5 * Mat::Identity(2, 2)));
  CHECK_NOTHROW(linops::validate_density(basis_projection(2, 0)));
}

TEST_CASE("commutant ranks of standard generating sets") {
  CHECK(linops::commutant({}, 2).rank() == 4);
  CHECK(linops::commutant({sigma_z()}, 2).rank() == 2);
  CHECK(linops::commutant({sigma_x(), sigma_z()}, 2).rank() == 1);
  // eigenspace dimensions 1, 1, 3: commutant rank 1 + 1 + 9
  CHECK(linops::commutant({diag({0, 1, 2, 2, 2})}, 5).rank() == 11);
}

TEST_CASE("generated algebra of standard sets") {
  auto scalars = linops::generated_algebra({}, 2);
  CHECK(scalars.algebra.rank() == 1);
  CHECK(scalars.commutative);

  auto dz = linops::generated_algebra({sigma_z()}, 2);
  CHECK(dz.algebra.rank() == 2);
  CHECK(dz.commutative);
  CHECK(linops::algebra_member(dz.algebra, diag({3.0, -7.0})));
  CHECK_FALSE(linops::algebra_member(dz.algebra, sigma_x()));

  auto full = linops::generated_algebra({sigma_x(), sigma_z()}, 2);
  CHECK(full.algebra.rank() == 4);
  CHECK_FALSE(full.commutative);

  // three distinct eigenvalues generate the full diagonal algebra
  auto d3 = linops::generated_algebra({diag({0, 1, 2})}, 3);
  CHECK(d3.algebra.rank() == 3);
  CHECK(d3.commutative);
  // a repeated eigenvalue generates a smaller algebra
  auto d2 = linops::generated_algebra({diag({0, 1, 1})}, 3);
  CHECK(d2.algebra.rank() == 2);
}

TEST_CASE("generated algebra is a *-algebra containing the generators") {
  Rng rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next_u64() % 3);
    std::vector<Mat> gens = {random_hermitian(rng, dim)};
    if (trial % 2 == 1) gens.push_back(random_hermitian(rng, dim));
    auto g = linops::generated_algebra(gens, dim);
    CHECK(linops::spans_algebra(g.algebra));
    for (const Mat& x : gens) CHECK(linops::algebra_member(g.algebra, x));
    CHECK(linops::algebra_member(g.algebra, Mat::Identity(dim, dim)));
    // regenerating from a basis of the algebra is idempotent
    auto again = linops::generated_algebra(g.algebra.basis, dim);
    CHECK(again.algebra.rank() == g.algebra.rank());
    // a single hermitian generator always yields a commutative algebra
    if (gens.size() == 1) CHECK(g.commutative);
  }
}

TEST_CASE("minimal projections partition the identity") {
  Rng rng(5);
  auto d = linops::generated_algebra({diag({0, 1, 2, 2, 2})}, 5);
  auto ps = linops::minimal_projections(d.algebra, rng);
  REQUIRE(ps.size() == 3);
  Mat sum = Mat::Zero(5, 5);
  std::vector<int> ranks;
  for (const Mat& p : ps) {
    CHECK(linops::is_projection(p));
    CHECK(linops::algebra_member(d.algebra, p));
    ranks.push_back(static_cast<int>(std::lround(p.trace().real())));
    sum += p;
  }
  std::sort(ranks.begin(), ranks.end());
  CHECK(ranks == std::vector<int>{1, 1, 3});
  CHECK(linops::frob_norm(sum - Mat::Identity(5, 5)) < 1e-8);
  for (size_t i = 0; i < ps.size(); ++i)
    for (size_t j = i + 1; j < ps.size(); ++j)
      CHECK(linops::frob_norm(ps[i] * ps[j]) < 1e-8);
}

TEST_CASE("minimal projections: scalars and full diagonal") {
  Rng rng(5);
  auto ci = linops::generated_algebra({}, 3);
  auto ps = linops::minimal_projections(ci.algebra, rng);
  REQUIRE(ps.size() == 1);
  CHECK(linops::frob_norm(ps[0] - Mat::Identity(3, 3)) < 1e-8);

  auto d4 = linops::generated_algebra({diag({1, 2, 3, 4})}, 4);
  auto qs = linops::minimal_projections(d4.algebra, rng);
  REQUIRE(qs.size() == 4);
  for (const Mat& q : qs) CHECK(std::abs(q.trace().real() - 1.0) < 1e-8);
}

TEST_CASE("minimal projections are canonical across rng seeds") {
  Rng a(1), b(999);
  auto alg = linops::generated_algebra({sigma_x()}, 2).algebra;
  auto pa = linops::minimal_projections(alg, a);
  auto pb = linops::minimal_projections(alg, b);
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i)
    CHECK(linops::frob_norm(pa[i] - pb[i]) < 1e-8);
}

TEST_CASE("minimal projection count equals algebra rank") {
  Rng rng(23);
  for (int trial = 0; trial < 6; ++trial) {
    const int dim = 3 + static_cast<int>(rng.next_u64() % 2);
    Mat u = random_unitary(rng, dim);
    std::vector<double> evs;
    for (int i = 0; i < dim; ++i)
      evs.push_back(static_cast<double>(rng.next_u64() % 3));
    Mat h = u * diag(evs) * u.adjoint();
    h = ((h + h.adjoint()) / 2).eval();
    auto g = linops::generated_algebra({h}, dim);
    REQUIRE(g.commutative);
    auto ps = linops::minimal_projections(g.algebra, rng);
    CHECK(static_cast<int>(ps.size()) == g.algebra.rank());
    Mat sum = Mat::Zero(dim, dim);
    for (const Mat& p : ps) sum += p;
    CHECK(linops::frob_norm(sum - Mat::Identity(dim, dim)) < 1e-7);
  }
}

TEST_CASE("minimal projections reject noncommutative algebras") {
  Rng rng(3);
  auto full = linops::generated_algebra({sigma_x(), sigma_z()}, 2);
  CHECK_THROWS_AS(linops::minimal_projections(full.algebra, rng),
                  NotCommutative);
}

TEST_CASE("matrix exponential of hermitian arguments") {
  CHECK(linops::frob_norm(linops::matrix_exp_i(Mat::Zero(3, 3)) -
                          Mat::Identity(3, 3)) < 1e-12);
  const double pi = 3.14159265358979323846;
  CHECK(linops::frob_norm(linops::matrix_exp_i(pi * sigma_z()) +
                          Mat::Identity(2, 2)) < 1e-9);
  Rng rng(77);
  Mat h = random_hermitian(rng, 4);
  Mat u = linops::matrix_exp_i(h);
  CHECK(linops::frob_norm(u * u.adjoint() - Mat::Identity(4, 4)) < 1e-9);
  // commuting arguments multiply
  Mat a = diag({0.3, -1.2, 0.5, 0});
  Mat b = diag({1.1, 0.2, -0.4, 2});
  CHECK(linops::frob_norm(linops::matrix_exp_i(a + b) -
                          linops::matrix_exp_i(a) * linops::matrix_exp_i(b)) <
        1e-9);
}

TEST_CASE("entry_key orders projections deterministically") {
  const Mat p0 = basis_projection(2, 0);
  const Mat p1 = basis_projection(2, 1);
  CHECK(linops::entry_key(p0) == linops::entry_key(p0));
  CHECK(linops::entry_key(p0) != linops::entry_key(p1));
}
