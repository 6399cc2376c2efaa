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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace p2b {

/// Differential-privacy epsilon achieved by Bernoulli(p) pre-sampling
/// composed with (l, epsilon_bar)-crowd-blending:
///
///   epsilon = ln( p * ((2 - p) / (1 - p)) * e^epsilon_bar + (1 - p) )
///
/// The encoder used here gives every crowd member an identical code, so
/// epsilon_bar = 0 in the deployed configuration and epsilon depends on the
/// participation probability alone.
inline double epsilon_of(double p, double epsilon_bar) {
  if (!(p >= 0.0 && p < 1.0))
    throw std::domain_error("epsilon_of: p must lie in [0, 1)");
  if (!(epsilon_bar >= 0.0))
    throw std::domain_error("epsilon_of: epsilon_bar must be >= 0");
  return std::log(p * ((2.0 - p) / (1.0 - p)) * std::exp(epsilon_bar) +
                  (1.0 - p));
}

/// Relative delta for crowd size l and sampling probability p:
///
///   delta = e^(-omega_c * l * (1 - p)^2)
///
/// The multiplicative constant inside the exponent is not fixed by the
/// crowd-blending analysis consumed here; omega_c exposes it. Results are
/// therefore "relative delta" unless the caller supplies the constant.
inline double delta_of(std::int64_t l, double p, double omega_c) {
  if (l < 1) throw std::domain_error("delta_of: l must be >= 1");
  if (!(p >= 0.0 && p < 1.0))
    throw std::domain_error("delta_of: p must lie in [0, 1)");
  if (!(omega_c > 0.0)) throw std::domain_error("delta_of: omega_c must be > 0");
  return std::exp(-omega_c * static_cast<double>(l) * (1.0 - p) * (1.0 - p));
}

/// Crowd size supported by an encoder that spreads u reporting users evenly
/// over k codes: floor(u / k). Rounding down is conservative; a smaller
/// crowd never overstates the guarantee. When u < k no crowd forms and the
/// caller should match l to the shuffler threshold instead.
inline std::int64_t crowd_blending_l(std::int64_t u, std::int64_t k) {
  if (k < 1) throw std::domain_error("crowd_blending_l: k must be >= 1");
  if (u < k)
    throw std::domain_error(
        "crowd_blending_l: u < k leaves some codes without a crowd; "
        "set l from the shuffler threshold instead");
  return u / k;
}

/// Sequential composition over m reports from one user: m * epsilon.
inline double compose(std::int64_t m, double epsilon) {
  if (m < 1) throw std::domain_error("compose: m must be >= 1");
  if (!(epsilon >= 0.0)) throw std::domain_error("compose: epsilon must be >= 0");
  return static_cast<double>(m) * epsilon;
}

/// Sanity rule: a delta above 1/u permits exposing some user outright.
inline bool delta_check(double delta, std::int64_t u) {
  if (u < 1) throw std::domain_error("delta_check: u must be >= 1");
  return delta <= 1.0 / static_cast<double>(u);
}

/// Asymmetric reporting gates positive and negative rewards at different
/// rates; accounting uses the worst case of the two.
inline double worst_case_p(double p_positive, double p_negative) {
  return std::max(p_positive, p_negative);
}

}  // namespace p2b
