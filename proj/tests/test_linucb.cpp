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

#include "p2b/linucb.hpp"

#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>

#include "p2b/bandit_io.hpp"
#include "p2b/code_bandit.hpp"
#include "p2b/rng.hpp"

using p2b::CodeLinUcbD;
using p2b::LinUcbD;
using p2b::merge_statistics;
using p2b::RewardObservation;
using p2b::Rng;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Oracle scores from fresh direct solves of the exact design matrices;
// independent of the incremental inverse maintained inside the agent.
Eigen::VectorXd oracle_scores(const LinUcbD& agent, const Eigen::VectorXd& x) {
  Eigen::VectorXd scores(agent.actions());
  for (int a = 0; a < agent.actions(); ++a) {
    const Eigen::LLT<Eigen::MatrixXd> llt(agent.design(a));
    const Eigen::VectorXd theta = llt.solve(agent.response(a));
    const double width2 = x.dot(llt.solve(x));
    scores[a] = theta.dot(x) + agent.alpha() * std::sqrt(std::max(width2, 0.0));
  }
  return scores;
}

}  // namespace

TEST_CASE("new agent starts at identity prior") {
  const LinUcbD agent(2, 3, 1.0);
  for (int a = 0; a < 3; ++a) {
    CHECK(agent.design(a).isApprox(Eigen::MatrixXd::Identity(2, 2)));
    CHECK(agent.response(a).isZero());
  }
  const LinUcbD scalar(1, 1, 0.0);
  CHECK(scalar.design(0)(0, 0) == 1.0);
  const LinUcbD wide(10, 40, 1.0);
  CHECK(wide.design(39).rows() == 10);
  CHECK(wide.response(39).size() == 10);
}

TEST_CASE("constructor domain errors") {
  CHECK_THROWS_AS(LinUcbD(0, 3, 1.0), std::domain_error);
  CHECK_THROWS_AS(LinUcbD(2, 0, 1.0), std::domain_error);
  CHECK_THROWS_AS(LinUcbD(2, 3, -0.5), std::domain_error);
}

TEST_CASE("fresh agent scores and tie-break") {
  LinUcbD agent(2, 3, 1.0);
  const auto sel = agent.select_action(vec({1, 0}));
  CHECK(sel.action == 0);
  for (int a = 0; a < 3; ++a) CHECK(sel.scores[a] == doctest::Approx(1.0));

  LinUcbD greedy(2, 3, 0.0);
  const auto g = greedy.select_action(vec({1, 0}));
  CHECK(g.action == 0);
  for (int a = 0; a < 3; ++a) CHECK(g.scores[a] == 0.0);
}

TEST_CASE("hand-derived score after one update") {
  LinUcbD agent(2, 3, 1.0);
  agent.update(vec({1, 0}), 0, 1.0);
  CHECK(agent.design(0).isApprox(
      Eigen::Vector2d(2, 1).asDiagonal().toDenseMatrix()));
  CHECK(agent.response(0).isApprox(vec({1, 0})));

  const auto sel = agent.select_action(vec({1, 0}));
  CHECK(sel.scores[0] ==
        doctest::Approx(0.5 + std::sqrt(0.5)).epsilon(1e-12));
  CHECK(sel.action == 0);
}

TEST_CASE("zero reward still sharpens the design matrix") {
  LinUcbD agent(2, 2, 1.0);
  agent.update(vec({1, 0}), 0, 0.0);
  CHECK(agent.response(0).isZero());
  CHECK(agent.design(0)(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("two orthogonal updates give theta (0.5, 0.5)") {
  LinUcbD agent(2, 1, 1.0);
  agent.update(vec({0, 1}), 0, 1.0);
  agent.update(vec({1, 0}), 0, 1.0);
  CHECK(agent.design(0).isApprox(2.0 * Eigen::MatrixXd::Identity(2, 2)));
  CHECK(agent.response(0).isApprox(vec({1, 1})));
  const Eigen::VectorXd theta =
      agent.design(0).llt().solve(agent.response(0));
  CHECK(theta.isApprox(vec({0.5, 0.5}), 1e-12));
}

TEST_CASE("update validation") {
  LinUcbD agent(2, 2, 1.0);
  CHECK_THROWS_AS(agent.update(vec({1, 0, 0}), 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(agent.update(vec({1, 0}), 5, 1.0), std::out_of_range);
  CHECK_THROWS_AS(agent.update(vec({1, 0}), 0, 0.5), std::domain_error);
  CHECK_THROWS_AS(agent.select_action(vec({1, std::nan("")})),
                  std::invalid_argument);
}

TEST_CASE("incremental scores match fresh direct solves") {
  Rng rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_below(20));
    const int actions = 1 + static_cast<int>(rng.uniform_below(8));
    LinUcbD agent(d, actions, 1.0);
    for (int step = 0; step < 600; ++step) {
      Eigen::VectorXd x(d);
      for (int i = 0; i < d; ++i) x[i] = rng.uniform01();
      const int a = static_cast<int>(rng.uniform_below(actions));
      agent.update(x, a, rng.bernoulli(0.4) ? 1.0 : 0.0);
      if (step % 97 == 0) {
        Eigen::VectorXd probe(d);
        for (int i = 0; i < d; ++i) probe[i] = rng.uniform01();
        const auto sel = agent.select_action(probe);
        const auto oracle = oracle_scores(agent, probe);
        for (int k = 0; k < actions; ++k)
          CHECK(sel.scores[k] == doctest::Approx(oracle[k]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("design matrices stay SPD under update sequences") {
  Rng rng(7);
  LinUcbD agent(6, 4, 1.0);
  for (int step = 0; step < 3000; ++step) {
    Eigen::VectorXd x(6);
    for (int i = 0; i < 6; ++i) x[i] = rng.uniform01() * 2.0 - 0.5;
    agent.update(x, static_cast<int>(rng.uniform_below(4)),
                 rng.bernoulli(0.5) ? 1.0 : 0.0);
  }
  for (int a = 0; a < 4; ++a) {
    const Eigen::LLT<Eigen::MatrixXd> llt(agent.design(a));
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("merge_statistics equals sequential updates in any order") {
  Rng rng(11);
  std::vector<RewardObservation> batch;
  for (int i = 0; i < 80; ++i) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform01();
    batch.push_back({x, static_cast<int>(rng.uniform_below(3)),
                     rng.bernoulli(0.5) ? 1 : 0});
  }

  LinUcbD forward(3, 3, 1.0);
  merge_statistics(forward, batch);

  std::vector<RewardObservation> reversed(batch.rbegin(), batch.rend());
  LinUcbD backward(3, 3, 1.0);
  merge_statistics(backward, reversed);

  for (int a = 0; a < 3; ++a) {
    CHECK((forward.design(a) - backward.design(a)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((forward.response(a) - backward.response(a)).cwiseAbs().maxCoeff() <
          1e-12);
  }

  LinUcbD empty_merge(3, 3, 1.0);
  merge_statistics(empty_merge, std::span<const RewardObservation>{});
  CHECK(empty_merge.design(0).isApprox(Eigen::MatrixXd::Identity(3, 3)));

  LinUcbD single(3, 3, 1.0);
  merge_statistics(single, std::span<const RewardObservation>(batch.data(), 1));
  LinUcbD direct(3, 3, 1.0);
  direct.update(batch[0]);
  CHECK(single.design(batch[0].action).isApprox(direct.design(batch[0].action)));
}

TEST_CASE("selection is deterministic and scale-covariant at alpha=0") {
  LinUcbD agent(2, 3, 0.0);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd x(2);
    x << rng.uniform01(), rng.uniform01();
    agent.update(x, static_cast<int>(rng.uniform_below(3)),
                 rng.bernoulli(0.5) ? 1.0 : 0.0);
  }
  const Eigen::VectorXd probe = vec({0.3, 0.7});
  const auto first = agent.select_action(probe);
  const auto second = agent.select_action(probe);
  CHECK(first.action == second.action);
  CHECK(first.scores == second.scores);

  // Scaling every response vector by c > 0 scales the pure-exploitation
  // scores by c and leaves the argmax unchanged.
  const auto base = agent.select_action(probe);
  int scaled_best = 0;
  double scaled_best_score = -1e300;
  for (int a = 0; a < 3; ++a) {
    const Eigen::VectorXd theta =
        agent.design(a).llt().solve(Eigen::VectorXd(3.0 * agent.response(a)));
    const double s = theta.dot(probe);
    CHECK(s == doctest::Approx(3.0 * base.scores[a]).epsilon(1e-9));
    if (s > scaled_best_score) {
      scaled_best_score = s;
      scaled_best = a;
    }
  }
  CHECK(scaled_best == base.action);
}

TEST_CASE("dense and code-specialized agents agree on one-hot streams") {
  const int k = 7;
  const int actions = 4;
  LinUcbD dense(k, actions, 1.0);
  CodeLinUcbD coded(k, actions, 1.0);
  Rng rng(5);
  for (int step = 0; step < 400; ++step) {
    const int code = static_cast<int>(rng.uniform_below(k));
    Eigen::VectorXd onehot = Eigen::VectorXd::Zero(k);
    onehot[code] = 1.0;

    const auto ds = dense.select_action(onehot);
    const auto cs = coded.select_action(code);
    CHECK(ds.action == cs.action);
    for (int a = 0; a < actions; ++a)
      CHECK(ds.scores[a] == doctest::Approx(cs.scores[a]).epsilon(1e-10));

    const int r = rng.bernoulli(0.3) ? 1 : 0;
    dense.update(onehot, cs.action, r);
    coded.update(code, cs.action, r);
  }
}

TEST_CASE("code bandit validates inputs") {
  CodeLinUcbD coded(4, 2, 1.0);
  CHECK_THROWS_AS(coded.select_action(4), std::out_of_range);
  CHECK_THROWS_AS(coded.select_action(-1), std::out_of_range);
  CHECK_THROWS_AS(coded.update(0, 2, 1), std::out_of_range);
  CHECK_THROWS_AS(coded.update(0, 0, 2), std::domain_error);
}

TEST_CASE("snapshot serialization round-trips") {
  LinUcbD agent(3, 2, 0.7);
  Rng rng(17);
  for (int i = 0; i < 40; ++i) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform01();
    agent.update(x, static_cast<int>(rng.uniform_below(2)),
                 rng.bernoulli(0.5) ? 1.0 : 0.0);
  }
  const auto text = p2b::linucb_to_json(agent);
  const auto restored = p2b::linucb_from_json(text);
  CHECK(restored.dim() == 3);
  CHECK(restored.actions() == 2);
  CHECK(restored.alpha() == doctest::Approx(0.7));
  for (int a = 0; a < 2; ++a) {
    CHECK(restored.design(a).isApprox(agent.design(a), 1e-15));
    CHECK(restored.response(a).isApprox(agent.response(a), 1e-15));
  }
  const Eigen::VectorXd probe = vec({0.2, 0.3, 0.5});
  CHECK(restored.select_action(probe).action ==
        agent.select_action(probe).action);
}

TEST_CASE("code-space snapshot round-trips") {
  CodeLinUcbD agent(5, 3, 1.0);
  Rng rng(29);
  for (int i = 0; i < 60; ++i)
    agent.update(static_cast<int>(rng.uniform_below(5)),
                 static_cast<int>(rng.uniform_below(3)),
                 rng.bernoulli(0.5) ? 1 : 0);
  const auto restored = p2b::code_linucb_from_json(p2b::code_linucb_to_json(agent));
  CHECK(restored.codes() == 5);
  CHECK(restored.actions() == 3);
  for (int a = 0; a < 3; ++a) {
    CHECK(restored.design_diagonal(a) == agent.design_diagonal(a));
    CHECK(restored.response(a) == agent.response(a));
  }
  for (int c = 0; c < 5; ++c)
    CHECK(restored.select_action(c).action == agent.select_action(c).action);
}

TEST_CASE("float instantiation compiles and runs") {
  p2b::LinUcb<float> agent(2, 2, 1.0f);
  Eigen::VectorXf x(2);
  x << 1.0f, 0.0f;
  agent.update(x, 0, 1.0f);
  CHECK(agent.select_action(x).scores[0] ==
        doctest::Approx(0.5f + std::sqrt(0.5f)));
}
