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

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qtopos/util.hpp"

namespace qtopos::linops {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Cplx = std::complex<double>;

inline constexpr int kMaxDim = 16;

// Throws InvalidInput unless m is square, finite and of dimension <= kMaxDim
// (and equal to expect_dim when given).
void check_matrix(const Mat& m, int expect_dim = -1);

double frob_norm(const Mat& m);
Cplx frob_inner(const Mat& a, const Mat& b);  // tr(a^* b)

bool is_hermitian(const Mat& m, double eps = kDefaultEps);
bool is_projection(const Mat& m, double eps = kDefaultEps);
// Loewner order on projections: p <= q iff q p = p.
bool loewner_leq(const Mat& p, const Mat& q, double eps = kDefaultEps);

void validate_projection(const Mat& m, double eps = kDefaultEps);
void validate_density(const Mat& m, double eps = kDefaultEps);
void validate_hermitian(const Mat& m, double eps = kDefaultEps);

// A *-closed unital subalgebra of M_n, stored as a Frobenius-orthonormal
// vector-space basis of its underlying subspace.
struct AlgebraBasis {
  int dim = 0;             // ambient dimension n
  std::vector<Mat> basis;  // orthonormal under <a,b> = tr(a^* b)
  int rank() const { return static_cast<int>(basis.size()); }
};

// Commutant of a finite generating set within M_dim: all x with
// x a = a x and x a^* = a^* x for every generator a.  The empty set has
// commutant M_dim.
AlgebraBasis commutant(const std::vector<Mat>& gens, int dim,
                       double eps = kDefaultEps);

struct GeneratedAlgebra {
  AlgebraBasis algebra;  // double commutant of the generators
  bool commutative = false;
};

// Smallest unital *-algebra containing the generators.
GeneratedAlgebra generated_algebra(const std::vector<Mat>& gens, int dim,
                                   double eps = kDefaultEps);

bool is_commutative(const AlgebraBasis& a, double eps = kDefaultEps);
bool algebra_member(const AlgebraBasis& a, const Mat& m,
                    double eps = kDefaultEps);

// Validation helper: the span contains I and is closed under adjoints and
// products (used by tests; quadratic in the rank).
bool spans_algebra(const AlgebraBasis& a, double eps = 1e-7);

// The minimal projections of a commutative algebra, in a canonical order
// (lexicographic on entries rounded to 1e-6).  They partition the identity.
// Throws NotCommutative on noncommutative input.
std::vector<Mat> minimal_projections(const AlgebraBasis& a, Rng& rng,
                                     double eps = kDefaultEps);

// e^{i h} for Hermitian h, via the spectral decomposition.
Mat matrix_exp_i(const Mat& h, double eps = kDefaultEps);

// Canonical sort key used to order projections deterministically.
std::vector<std::pair<long long, long long>> entry_key(const Mat& m);

}  // namespace qtopos::linops
