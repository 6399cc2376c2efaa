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

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace p2b {

/// One observed interaction: the context shown, the action taken, and the
/// binary reward received.
struct RewardObservation {
  Eigen::VectorXd context;
  int action = 0;
  int reward = 0;
};

/// Disjoint-arms LinUCB. Each action keeps ridge-regression statistics
/// A = I + sum(x x^T) and b = sum(r x); the score of action a for context x
/// is theta_a . x + alpha * sqrt(x^T A_a^-1 x) with theta_a = A_a^-1 b_a.
///
/// The inverse is maintained incrementally through Sherman-Morrison updates
/// and refreshed from a Cholesky factorization every kRefreshInterval
/// updates to keep drift bounded; A itself is always the exact sum and is
/// the serialized source of truth.
template <typename Scalar = double>
class LinUcb {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Selection {
    int action = 0;
    Vector scores;
  };

  LinUcb() = default;

  LinUcb(int dim, int actions, Scalar alpha)
      : dim_(dim), actions_(actions), alpha_(alpha) {
    if (dim < 1) throw std::domain_error("LinUcb: dim must be >= 1");
    if (actions < 1) throw std::domain_error("LinUcb: actions must be >= 1");
    if (!(alpha >= Scalar(0))) throw std::domain_error("LinUcb: alpha must be >= 0");
    design_.assign(actions_, Matrix::Identity(dim_, dim_));
    inverse_.assign(actions_, Matrix::Identity(dim_, dim_));
    response_.assign(actions_, Vector::Zero(dim_));
    updates_since_refresh_.assign(actions_, 0);
  }

  int dim() const { return dim_; }
  int actions() const { return actions_; }
  Scalar alpha() const { return alpha_; }

  const Matrix& design(int action) const { return design_[check_action(action)]; }
  const Vector& response(int action) const { return response_[check_action(action)]; }

  Selection select_action(const Eigen::Ref<const Vector>& x) const {
    check_context(x);
    Selection sel;
    sel.scores.resize(actions_);
    for (int a = 0; a < actions_; ++a) {
      const Vector theta = inverse_[a] * response_[a];
      const Scalar width2 = x.dot(inverse_[a] * x);
      sel.scores[a] =
          theta.dot(x) + alpha_ * std::sqrt(std::max(width2, Scalar(0)));
    }
    sel.action = 0;
    for (int a = 1; a < actions_; ++a)
      if (sel.scores[a] > sel.scores[sel.action]) sel.action = a;
    return sel;
  }

  void update(const Eigen::Ref<const Vector>& x, int action, Scalar reward) {
    check_context(x);
    check_action(action);
    if (reward != Scalar(0) && reward != Scalar(1))
      throw std::domain_error("LinUcb: reward must be 0 or 1");
    design_[action].noalias() += x * x.transpose();
    response_[action] += reward * x;

    if (++updates_since_refresh_[action] >= kRefreshInterval) {
      refresh_inverse(action);
    } else {
      // Sherman-Morrison: (A + x x^T)^-1 = A^-1 - (A^-1 x)(A^-1 x)^T / (1 + x^T A^-1 x)
      const Vector v = inverse_[action] * x;
      inverse_[action].noalias() -= v * v.transpose() / (Scalar(1) + x.dot(v));
    }
  }

  void update(const RewardObservation& obs) {
    update(obs.context.template cast<Scalar>(), obs.action,
           static_cast<Scalar>(obs.reward));
  }

  /// Rebuilds all inverses from the exact design matrices.
  void refresh_inverses() {
    for (int a = 0; a < actions_; ++a) refresh_inverse(a);
  }

  /// Reconstructs an agent from snapshot statistics; inverses are recomputed.
  static LinUcb from_state(int dim, int actions, Scalar alpha,
                           std::vector<Matrix> design,
                           std::vector<Vector> response) {
    LinUcb out(dim, actions, alpha);
    if (static_cast<int>(design.size()) != actions ||
        static_cast<int>(response.size()) != actions)
      throw std::invalid_argument("LinUcb::from_state: per-action state count mismatch");
    for (int a = 0; a < actions; ++a)
      if (design[a].rows() != dim || design[a].cols() != dim ||
          response[a].size() != dim)
        throw std::invalid_argument("LinUcb::from_state: state shape mismatch");
    out.design_ = std::move(design);
    out.response_ = std::move(response);
    out.refresh_inverses();
    return out;
  }

 private:
  static constexpr int kRefreshInterval = 256;

  int check_action(int action) const {
    if (action < 0 || action >= actions_)
      throw std::out_of_range("LinUcb: action index out of range");
    return action;
  }

  void check_context(const Eigen::Ref<const Vector>& x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("LinUcb: context dimension mismatch");
    if (!x.allFinite())
      throw std::invalid_argument("LinUcb: context entries must be finite");
  }

  void refresh_inverse(int action) {
    inverse_[action] =
        design_[action].llt().solve(Matrix::Identity(dim_, dim_));
    updates_since_refresh_[action] = 0;
  }

  int dim_ = 0;
  int actions_ = 0;
  Scalar alpha_ = Scalar(0);
  std::vector<Matrix> design_;
  std::vector<Matrix> inverse_;
  std::vector<Vector> response_;
  std::vector<int> updates_since_refresh_;
};

/// Folds a batch of observations into the target state in order. Updates
/// commute (rank-one sums), so any permutation of the batch yields the same
/// statistics up to floating-point reordering.
template <typename Scalar>
void merge_statistics(LinUcb<Scalar>& dst,
                      std::span<const RewardObservation> batch) {
  for (const auto& obs : batch) dst.update(obs);
}

using LinUcbD = LinUcb<double>;

}  // namespace p2b
