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

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtopos {

inline constexpr double kDefaultEps = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user-supplied data: wrong shapes, non-finite entries, objects that
// fail their structural preconditions.
struct InvalidInput : Error {
  using Error::Error;
};
// A set of generators whose exponentials generate a noncommutative algebra
// where a commutative one is required.
struct NonCommutingSet : Error {
  using Error::Error;
};
// An operation that only makes sense on a commutative algebra was handed a
// noncommutative one.
struct NotCommutative : Error {
  using Error::Error;
};
// An enumeration would exceed its configured guard.
struct SizeLimit : Error {
  using Error::Error;
};
// Extension along a subobject that is not dense.
struct NotDense : Error {
  using Error::Error;
};
// A presheaf required to be a sheaf is not one.
struct NotSheaf : Error {
  using Error::Error;
};
// A truth-object stage violated the filter/consistency conditions.
struct NotFilter : Error {
  using Error::Error;
};
// The context poset failed closure or order axioms after construction.
struct ClosureViolation : Error {
  using Error::Error;
};
// Scenario file is not syntactically valid JSON.
struct ParseError : Error {
  using Error::Error;
};
// Scenario file is valid JSON but semantically invalid.
struct ValidationError : Error {
  using Error::Error;
};

// Dynamic bitset over small id universes (contexts, presheaf elements).
class IdSet {
 public:
  IdSet() = default;
  explicit IdSet(int universe) : n_(universe), w_((universe + 63) / 64, 0) {}

  int universe() const { return n_; }

  void set(int i) { w_[i >> 6] |= (uint64_t{1} << (i & 63)); }
  void reset(int i) { w_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  int count() const {
    int c = 0;
    for (uint64_t w : w_) c += __builtin_popcountll(w);
    return c;
  }
  bool empty() const {
    for (uint64_t w : w_)
      if (w) return false;
    return true;
  }

  bool subset_of(const IdSet& o) const {
    for (size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & ~o.w_[k]) return false;
    return true;
  }

  IdSet operator&(const IdSet& o) const {
    IdSet r(n_);
    for (size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] & o.w_[k];
    return r;
  }
  IdSet operator|(const IdSet& o) const {
    IdSet r(n_);
    for (size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] | o.w_[k];
    return r;
  }
  IdSet operator-(const IdSet& o) const {
    IdSet r(n_);
    for (size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] & ~o.w_[k];
    return r;
  }

  bool operator==(const IdSet& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const IdSet& o) const { return !(*this == o); }
  bool operator<(const IdSet& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    for (size_t k = w_.size(); k-- > 0;)
      if (w_[k] != o.w_[k]) return w_[k] < o.w_[k];
    return false;
  }

  std::vector<int> members() const {
    std::vector<int> out;
    for (int i = 0; i < n_; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }

  static IdSet full(int universe) {
    IdSet r(universe);
    for (int i = 0; i < universe; ++i) r.set(i);
    return r;
  }

 private:
  int n_ = 0;
  std::vector<uint64_t> w_;
};

// Deterministic RNG shared by the handful of randomized numerics
// (generic-element sampling, fixture generation).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qtopos
