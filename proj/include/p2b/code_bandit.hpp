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
#include <cmath>
#include <stdexcept>
#include <vector>

namespace p2b {

/// LinUCB specialized to one-hot code contexts. When every context is a
/// standard basis vector e_c, the design matrix I + sum(e_c e_c^T) stays
/// diagonal, so per-action state reduces to a diagonal vector and a response
/// vector, and scores collapse to
///
///   score_a(c) = b_a[c] / A_a[c,c] + alpha * sqrt(1 / A_a[c,c]).
///
/// This is algebraically identical to the dense agent fed e_c (see the
/// equivalence tests) but runs selection in O(|A|) and updates in O(1).
template <typename Scalar = double>
class CodeLinUcb {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Selection {
    int action = 0;
    Vector scores;
  };

  CodeLinUcb() = default;

  CodeLinUcb(int codes, int actions, Scalar alpha)
      : codes_(codes), actions_(actions), alpha_(alpha) {
    if (codes < 1) throw std::domain_error("CodeLinUcb: codes must be >= 1");
    if (actions < 1) throw std::domain_error("CodeLinUcb: actions must be >= 1");
    if (!(alpha >= Scalar(0)))
      throw std::domain_error("CodeLinUcb: alpha must be >= 0");
    diagonal_.assign(actions_, Vector::Ones(codes_));
    response_.assign(actions_, Vector::Zero(codes_));
  }

  int codes() const { return codes_; }
  int actions() const { return actions_; }
  Scalar alpha() const { return alpha_; }

  const Vector& design_diagonal(int action) const {
    return diagonal_[check_action(action)];
  }
  const Vector& response(int action) const {
    return response_[check_action(action)];
  }

  Selection select_action(int code) const {
    check_code(code);
    Selection sel;
    sel.scores.resize(actions_);
    for (int a = 0; a < actions_; ++a) {
      const Scalar d = diagonal_[a][code];
      sel.scores[a] = response_[a][code] / d + alpha_ * std::sqrt(Scalar(1) / d);
    }
    sel.action = 0;
    for (int a = 1; a < actions_; ++a)
      if (sel.scores[a] > sel.scores[sel.action]) sel.action = a;
    return sel;
  }

  void update(int code, int action, Scalar reward) {
    check_code(code);
    check_action(action);
    if (reward != Scalar(0) && reward != Scalar(1))
      throw std::domain_error("CodeLinUcb: reward must be 0 or 1");
    diagonal_[action][code] += Scalar(1);
    response_[action][code] += reward;
  }

  /// Reconstructs an agent from snapshot statistics.
  static CodeLinUcb from_state(int codes, int actions, Scalar alpha,
                               std::vector<Vector> diagonal,
                               std::vector<Vector> response) {
    CodeLinUcb out(codes, actions, alpha);
    if (static_cast<int>(diagonal.size()) != actions ||
        static_cast<int>(response.size()) != actions)
      throw std::invalid_argument("CodeLinUcb::from_state: per-action state count mismatch");
    for (int a = 0; a < actions; ++a)
      if (diagonal[a].size() != codes || response[a].size() != codes)
        throw std::invalid_argument("CodeLinUcb::from_state: state shape mismatch");
    out.diagonal_ = std::move(diagonal);
    out.response_ = std::move(response);
    return out;
  }

 private:
  int check_action(int action) const {
    if (action < 0 || action >= actions_)
      throw std::out_of_range("CodeLinUcb: action index out of range");
    return action;
  }
  void check_code(int code) const {
    if (code < 0 || code >= codes_)
      throw std::out_of_range("CodeLinUcb: code out of range");
  }

  int codes_ = 0;
  int actions_ = 0;
  Scalar alpha_ = Scalar(0);
  std::vector<Vector> diagonal_;
  std::vector<Vector> response_;
};

using CodeLinUcbD = CodeLinUcb<double>;

}  // namespace p2b
