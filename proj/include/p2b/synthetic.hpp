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
#include <stdexcept>

#include "p2b/rng.hpp"

namespace p2b {

/// Numerically stable softmax (max-subtracted). Outputs sum to 1.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector logits = v;
  if (!logits.allFinite())
    throw std::invalid_argument("softmax: entries must be finite");
  const Scalar max = logits.maxCoeff();
  Vector out = (logits.array() - max).exp();
  return out / out.sum();
}

/// Synthetic preference environment. A fixed random weight matrix W and bias
/// b define a per-context action-preference profile softmax(W x + b); the
/// mean reward of action a is beta * softmax(W x + b)[a] plus Gaussian noise,
/// and realized rewards are Bernoulli draws of the clamped mean.
class SyntheticEnv {
 public:
  /// Weight entries are N(0, kWeightStdDev^2). Contexts live on the unit
  /// simplex (norm well below 1), so unit-variance weights would leave logit
  /// spreads under 1 and the softmax nearly uniform across actions; this
  /// scale makes preference profiles decisive per context.
  static constexpr double kWeightStdDev = 6.0;

  SyntheticEnv(int d, int actions, double beta, double sigma2,
               std::uint64_t seed)
      : beta_(beta), sigma_(std::sqrt(sigma2)) {
    if (d < 1 || actions < 1)
      throw std::domain_error("SyntheticEnv: d and actions must be >= 1");
    if (!(beta >= 0.0 && beta <= 1.0))
      throw std::domain_error("SyntheticEnv: beta must lie in [0, 1]");
    if (!(sigma2 >= 0.0))
      throw std::domain_error("SyntheticEnv: sigma2 must be >= 0");
    Rng rng(seed);
    weights_.resize(actions, d);
    for (Eigen::Index r = 0; r < weights_.rows(); ++r)
      for (Eigen::Index c = 0; c < weights_.cols(); ++c)
        weights_(r, c) = rng.normal(0.0, kWeightStdDev);
    bias_ = Eigen::VectorXd::Zero(actions);
  }

  /// Environment with explicit weights, for controlled setups.
  SyntheticEnv(Eigen::MatrixXd weights, Eigen::VectorXd bias, double beta,
               double sigma2)
      : beta_(beta),
        sigma_(std::sqrt(sigma2)),
        weights_(std::move(weights)),
        bias_(std::move(bias)) {
    if (weights_.rows() != bias_.size() || weights_.rows() < 1 ||
        weights_.cols() < 1)
      throw std::domain_error("SyntheticEnv: inconsistent weight shapes");
    if (!(beta >= 0.0 && beta <= 1.0) || !(sigma2 >= 0.0))
      throw std::domain_error("SyntheticEnv: invalid beta or sigma2");
  }

  int dim() const { return static_cast<int>(weights_.cols()); }
  int actions() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& bias() const { return bias_; }

  Eigen::VectorXd action_preferences(
      const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return softmax(Eigen::VectorXd(weights_ * x + bias_));
  }

  /// Binary reward: Bernoulli(clamp(beta * pref_a(x) + z, 0, 1)) with
  /// z ~ N(0, sigma^2) drawn per call.
  int reward(const Eigen::Ref<const Eigen::VectorXd>& x, int action,
             Rng& rng) const {
    if (action < 0 || action >= actions())
      throw std::out_of_range("SyntheticEnv: action out of range");
    const Eigen::VectorXd prefs = action_preferences(x);
    const double mean = beta_ * prefs[action] + rng.normal(0.0, sigma_);
    return rng.bernoulli(std::clamp(mean, 0.0, 1.0)) ? 1 : 0;
  }

 private:
  double beta_;
  double sigma_;
  Eigen::MatrixXd weights_;
  Eigen::VectorXd bias_;
};

}  // namespace p2b
