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

#include <algorithm>
#include <cmath>

namespace qtopos::linops {

namespace {

// Relative threshold separating numerically-zero eigenvalues of the
// commutation Gram matrix from genuine ones.
constexpr double kNullTol = 1e-12;

bool all_finite(const Mat& m) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

// Frobenius Gram-Schmidt in input order; drops near-zero columns.
std::vector<Mat> gram_schmidt(const std::vector<Mat>& in) {
  std::vector<Mat> out;
  for (const Mat& cand : in) {
    Mat v = cand;
    for (const Mat& b : out) v -= frob_inner(b, v) * b;
    // re-orthogonalize once for stability
    for (const Mat& b : out) v -= frob_inner(b, v) * b;
    double n = frob_norm(v);
    if (n > 1e-10) out.push_back(v / n);
  }
  return out;
}

}  // namespace

void check_matrix(const Mat& m, int expect_dim) {
  if (m.rows() != m.cols()) throw InvalidInput("matrix is not square");
  if (m.rows() < 1 || m.rows() > kMaxDim)
    throw InvalidInput("matrix dimension out of range [1, 16]");
  if (expect_dim >= 0 && m.rows() != expect_dim)
    throw InvalidInput("matrix dimension mismatch");
  if (!all_finite(m)) throw InvalidInput("matrix has non-finite entries");
}

double frob_norm(const Mat& m) { return m.norm(); }

Cplx frob_inner(const Mat& a, const Mat& b) {
  return (a.adjoint() * b).trace();
}

bool is_hermitian(const Mat& m, double eps) {
  check_matrix(m);
  return frob_norm(Mat(m - m.adjoint())) <= eps;
}

bool is_projection(const Mat& m, double eps) {
  check_matrix(m);
  return is_hermitian(m, eps) && frob_norm(Mat(m * m - m)) <= eps;
}

bool loewner_leq(const Mat& p, const Mat& q, double eps) {
  check_matrix(p);
  check_matrix(q, static_cast<int>(p.rows()));
  return frob_norm(Mat(q * p - p)) <= eps;
}

void validate_projection(const Mat& m, double eps) {
  if (!is_projection(m, eps))
    throw InvalidInput("matrix is not a projection");
}

void validate_hermitian(const Mat& m, double eps) {
  if (!is_hermitian(m, eps)) throw InvalidInput("matrix is not Hermitian");
}

void validate_density(const Mat& m, double eps) {
  validate_hermitian(m, eps);
  if (std::abs(m.trace().real() - 1.0) > 1e-8 || std::abs(m.trace().imag()) > eps)
    throw InvalidInput("density matrix must have unit trace");
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw InvalidInput("density matrix must be positive semidefinite");
}

AlgebraBasis commutant(const std::vector<Mat>& gens, int dim, double eps) {
  (void)eps;
  if (dim < 1 || dim > kMaxDim)
    throw InvalidInput("ambient dimension out of range [1, 16]");
  const int n = dim;
  const int nn = n * n;

  // Gram matrix of the stacked commutation constraints
  // x a - a x = 0 and x a^* - a^* x = 0, over vec(x) (column-major).
  Mat gram = Mat::Zero(nn, nn);
  auto add_constraints = [&](const Mat& a) {
    // row (i,j): sum_l x_{il} a_{lj} - sum_k a_{ik} x_{kj}
    Mat rows = Mat::Zero(nn, nn);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        int r = i + n * j;
        for (int l = 0; l < n; ++l) rows(r, i + n * l) += a(l, j);
        for (int k = 0; k < n; ++k) rows(r, k + n * j) -= a(i, k);
      }
    gram += rows.adjoint() * rows;
  };
  for (const Mat& g : gens) {
    check_matrix(g, n);
    add_constraints(g);
    add_constraints(g.adjoint());
  }

  std::vector<Mat> null_basis;
  if (gens.empty()) {
    // Commutant of nothing: all of M_n, canonical matrix-unit basis.
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Mat e = Mat::Zero(n, n);
        e(i, j) = 1.0;
        null_basis.push_back(e);
      }
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    const double tol = kNullTol * std::max(1.0, es.eigenvalues().maxCoeff());
    for (int k = 0; k < nn; ++k) {
      if (es.eigenvalues()(k) > tol) continue;
      Mat x(n, n);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) x(i, j) = es.eigenvectors()(i + n * j, k);
      null_basis.push_back(x);
    }
  }

  AlgebraBasis out;
  out.dim = n;
  out.basis = gram_schmidt(null_basis);
  return out;
}

GeneratedAlgebra generated_algebra(const std::vector<Mat>& gens, int dim,
                                   double eps) {
  AlgebraBasis first = commutant(gens, dim, eps);
  GeneratedAlgebra out;
  out.algebra = commutant(first.basis, dim, eps);
  out.commutative = is_commutative(out.algebra, eps);
  return out;
}

bool is_commutative(const AlgebraBasis& a, double eps) {
  const double tol = std::max(eps, 1e-10);
  for (size_t i = 0; i < a.basis.size(); ++i)
    for (size_t j = i + 1; j < a.basis.size(); ++j)
      if (frob_norm(Mat(a.basis[i] * a.basis[j] - a.basis[j] * a.basis[i])) >
          tol)
        return false;
  return true;
}

bool algebra_member(const AlgebraBasis& a, const Mat& m, double eps) {
  check_matrix(m, a.dim);
  Mat residual = m;
  for (const Mat& b : a.basis) residual -= frob_inner(b, m) * b;
  return frob_norm(residual) <= std::max(eps, 1e-9);
}

bool spans_algebra(const AlgebraBasis& a, double eps) {
  const int n = a.dim;
  if (!algebra_member(a, Mat::Identity(n, n), eps)) return false;
  for (const Mat& b : a.basis)
    if (!algebra_member(a, Mat(b.adjoint()), eps)) return false;
  for (const Mat& b : a.basis)
    for (const Mat& c : a.basis)
      if (!algebra_member(a, Mat(b * c), eps)) return false;
  return true;
}

std::vector<std::pair<long long, long long>> entry_key(const Mat& m) {
  std::vector<std::pair<long long, long long>> key;
  key.reserve(m.rows() * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      double re = m(i, j).real() + 0.0, im = m(i, j).imag() + 0.0;
      key.emplace_back(std::llround(re * 1e6), std::llround(im * 1e6));
    }
  return key;
}

std::vector<Mat> minimal_projections(const AlgebraBasis& a, Rng& rng,
                                     double eps) {
  if (!is_commutative(a, eps)) throw NotCommutative("algebra is not commutative");
  const int n = a.dim;

  // Hermitian spanning set of the (necessarily *-closed) span.
  std::vector<Mat> herm_cands;
  for (const Mat& b : a.basis) {
    herm_cands.push_back((b + b.adjoint()) / 2.0);
    herm_cands.push_back((b - b.adjoint()) / Cplx(0.0, 2.0));
  }
  std::vector<Mat> herm = gram_schmidt(herm_cands);

  constexpr int kMaxTries = 5;
  constexpr double kGap = 1e-6;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    Mat generic = Mat::Zero(n, n);
    for (const Mat& h : herm) generic += rng.uniform(-1.0, 1.0) * h;

    Eigen::SelfAdjointEigenSolver<Mat> es(generic);
    std::vector<Mat> projs;
    int lo = 0;
    for (int k = 1; k <= n; ++k) {
      if (k < n && es.eigenvalues()(k) - es.eigenvalues()(k - 1) < kGap)
        continue;
      Mat p = Mat::Zero(n, n);
      for (int i = lo; i < k; ++i)
        p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      projs.push_back(p);
      lo = k;
    }

    // Each eigenprojection must lie in the algebra and cut out a
    // one-dimensional corner; otherwise the sample was degenerate.
    bool ok = true;
    for (const Mat& p : projs) {
      if (!algebra_member(a, p, 1e-7)) {
        ok = false;
        break;
      }
      std::vector<Mat> corner;
      for (const Mat& b : a.basis) corner.push_back(p * b * p);
      if (static_cast<int>(gram_schmidt(corner).size()) != 1) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    Mat sum = Mat::Zero(n, n);
    for (const Mat& p : projs) sum += p;
    if (frob_norm(Mat(sum - Mat::Identity(n, n))) > 1e-8) continue;

    std::sort(projs.begin(), projs.end(), [](const Mat& x, const Mat& y) {
      return entry_key(x) < entry_key(y);
    });
    return projs;
  }
  throw Error("minimal projection extraction failed after 5 attempts");
}

Mat matrix_exp_i(const Mat& h, double eps) {
  if (!is_hermitian(h, std::max(eps, 1e-9)))
    throw InvalidInput("matrix_exp_i requires a Hermitian argument");
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Mat d = Mat::Zero(h.rows(), h.rows());
  for (int k = 0; k < h.rows(); ++k)
    d(k, k) = std::exp(Cplx(0.0, es.eigenvalues()(k)));
  return es.eigenvectors() * d * es.eigenvectors().adjoint();
}

}  // namespace qtopos::linops
