// Copyright 2026 The P2B Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "p2b/rng.hpp"

namespace p2b {

/// Number of grid points that may be materialized or streamed by default.
inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

inline std::int64_t pow10i(int q) {
  std::int64_t v = 1;
  for (int i = 0; i < q; ++i) v *= 10;
  return v;
}

/// Minimal unsigned big integer, little-endian limbs in base 10^9. Supports
/// exactly the operations needed to evaluate binomial coefficients without
/// overflow: multiply by a small factor and exact division by a small factor.
class BigUint {
 public:
  BigUint() : limbs_{0} {}
  explicit BigUint(std::uint64_t v) {
    limbs_.clear();
    do {
      limbs_.push_back(static_cast<std::uint32_t>(v % kBase));
      v /= kBase;
    } while (v != 0);
  }

  void mul_small(std::uint64_t f) {
    std::uint64_t carry = 0;
    for (auto& limb : limbs_) {
      const std::uint64_t cur = static_cast<std::uint64_t>(limb) * f + carry;
      limb = static_cast<std::uint32_t>(cur % kBase);
      carry = cur / kBase;
    }
    while (carry != 0) {
      limbs_.push_back(static_cast<std::uint32_t>(carry % kBase));
      carry /= kBase;
    }
  }

  /// Divides by f, which must divide the value exactly.
  void div_exact_small(std::uint64_t f) {
    std::uint64_t rem = 0;
    for (auto it = limbs_.rbegin(); it != limbs_.rend(); ++it) {
      const std::uint64_t cur = rem * kBase + *it;
      *it = static_cast<std::uint32_t>(cur / f);
      rem = cur % f;
    }
    if (rem != 0) throw std::logic_error("BigUint: inexact division");
    trim();
  }

  bool fits_uint64() const {
    if (limbs_.size() > 3) return false;
    unsigned __int128 v = 0;
    for (auto it = limbs_.rbegin(); it != limbs_.rend(); ++it)
      v = v * kBase + *it;
    return v <= static_cast<unsigned __int128>(UINT64_MAX);
  }

  std::uint64_t as_uint64() const {
    if (!fits_uint64()) throw std::overflow_error("BigUint: value exceeds 64 bits");
    unsigned __int128 v = 0;
    for (auto it = limbs_.rbegin(); it != limbs_.rend(); ++it)
      v = v * kBase + *it;
    return static_cast<std::uint64_t>(v);
  }

  bool exceeds(std::uint64_t bound) const {
    return !fits_uint64() || as_uint64() > bound;
  }

  std::string to_string() const {
    std::string out = std::to_string(limbs_.back());
    for (auto it = limbs_.rbegin() + 1; it != limbs_.rend(); ++it) {
      std::string part = std::to_string(*it);
      out += std::string(9 - part.size(), '0') + part;
    }
    return out;
  }

  /// Exact C(n, k); stays integral after every intermediate division.
  static BigUint binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return BigUint(0);
    k = std::min(k, n - k);
    BigUint r(1);
    for (std::uint64_t i = 1; i <= k; ++i) {
      r.mul_small(n - k + i);
      r.div_exact_small(i);
    }
    return r;
  }

 private:
  static constexpr std::uint64_t kBase = 1'000'000'000;
  void trim() {
    while (limbs_.size() > 1 && limbs_.back() == 0) limbs_.pop_back();
  }
  std::vector<std::uint32_t> limbs_;
};

inline void check_dims(int d, int q) {
  if (d < 1) throw std::domain_error("context dimension d must be >= 1");
  if (q < 1 || q > 9) throw std::domain_error("precision q must be in [1, 9]");
}

/// Number of d-dimensional vectors with entries that are non-negative
/// multiples of 10^-q summing to 1: C(10^q + d - 1, d - 1).
inline BigUint cardinality(int d, int q) {
  check_dims(d, q);
  const std::uint64_t s = static_cast<std::uint64_t>(pow10i(q));
  return BigUint::binomial(s + d - 1, d - 1);
}

/// Normalized context vector at fixed precision. Entries are stored as
/// scaled integers (multiples of 10^-q) so the sum-to-one invariant is exact.
struct ContextVector {
  Eigen::VectorXi scaled;
  int precision_q = 1;

  int dim() const { return static_cast<int>(scaled.size()); }

  Eigen::VectorXd to_real() const {
    return scaled.cast<double>() / static_cast<double>(pow10i(precision_q));
  }
};

/// Largest-remainder rounding of raw non-negative weights onto the
/// fixed-precision grid. The output sums to exactly 10^q scaled units and
/// each entry deviates from the normalized input by less than 10^-q.
/// Remainder ties are broken toward the lowest index.
inline ContextVector normalize_and_round(const Eigen::VectorXd& raw, int q) {
  check_dims(static_cast<int>(raw.size()), q);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double v = raw[i];
    if (!std::isfinite(v) || v < 0.0)
      throw std::domain_error("normalize_and_round: entries must be finite and >= 0");
    sum += v;
  }
  if (sum <= 0.0)
    throw std::domain_error("normalize_and_round: at least one entry must be > 0");

  const int d = static_cast<int>(raw.size());
  const std::int64_t scale = pow10i(q);
  Eigen::VectorXi floors(d);
  std::vector<double> remainders(d);
  std::int64_t allocated = 0;
  for (int i = 0; i < d; ++i) {
    const double share = raw[i] / sum * static_cast<double>(scale);
    const double fl = std::floor(share);
    floors[i] = static_cast<int>(fl);
    remainders[i] = share - fl;
    allocated += floors[i];
  }

  std::int64_t leftover = scale - allocated;
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    return a < b;
  });
  for (int idx = 0; leftover > 0 && idx < d; ++idx, --leftover)
    floors[order[idx]] += 1;

  return ContextVector{floors, q};
}

/// Visits every grid point in lexicographic order as a scaled-integer vector.
template <class Fn>
void for_each_grid_point(int d, int q, Fn&& fn) {
  check_dims(d, q);
  const int total = static_cast<int>(pow10i(q));
  Eigen::VectorXi point(d);
  auto rec = [&](auto&& self, int index, int remaining) -> void {
    if (index == d - 1) {
      point[index] = remaining;
      fn(static_cast<const Eigen::VectorXi&>(point));
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      point[index] = v;
      self(self, index + 1, remaining - v);
    }
  };
  rec(rec, 0, total);
}

inline void check_enumeration_cap(int d, int q, std::uint64_t cap) {
  const BigUint n = cardinality(d, q);
  if (n.exceeds(cap))
    throw std::length_error("grid enumeration cap " + std::to_string(cap) +
                            " exceeded: n = " + n.to_string() + " points at d = " +
                            std::to_string(d) + ", q = " + std::to_string(q));
}

inline std::vector<ContextVector> enumerate_grid(
    int d, int q, std::uint64_t cap = kDefaultEnumerationCap) {
  check_enumeration_cap(d, q, cap);
  std::vector<ContextVector> out;
  out.reserve(cardinality(d, q).as_uint64());
  for_each_grid_point(d, q, [&](const Eigen::VectorXi& p) {
    out.push_back(ContextVector{p, q});
  });
  return out;
}

/// All grid points as real-valued rows of an n x d matrix.
inline Eigen::MatrixXd grid_matrix(int d, int q,
                                   std::uint64_t cap = kDefaultEnumerationCap) {
  check_enumeration_cap(d, q, cap);
  const auto n = cardinality(d, q).as_uint64();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), d);
  const double scale = static_cast<double>(pow10i(q));
  Eigen::Index row = 0;
  for_each_grid_point(d, q, [&](const Eigen::VectorXi& p) {
    m.row(row++) = p.cast<double>().transpose() / scale;
  });
  return m;
}

/// Uniform draw from the grid via the bars representation: d-1 distinct bar
/// positions among 10^q + d - 1 slots map bijectively onto grid points.
/// Floyd's sampling keeps this O(d log d) regardless of 10^q.
inline Eigen::VectorXi sample_grid_point(Rng& rng, int d, int q) {
  check_dims(d, q);
  const int total = static_cast<int>(pow10i(q));
  Eigen::VectorXi point(d);
  if (d == 1) {
    point[0] = total;
    return point;
  }
  const int slots = total + d - 1;
  std::vector<int> bars;
  bars.reserve(static_cast<size_t>(d - 1));
  for (int i = slots - (d - 1); i < slots; ++i) {
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    if (std::find(bars.begin(), bars.end(), j) != bars.end())
      bars.push_back(i);
    else
      bars.push_back(j);
  }
  std::sort(bars.begin(), bars.end());
  int prev = -1;
  for (int i = 0; i < d - 1; ++i) {
    point[i] = bars[i] - prev - 1;
    prev = bars[i];
  }
  point[d - 1] = slots - 1 - prev;
  return point;
}

}  // namespace p2b
