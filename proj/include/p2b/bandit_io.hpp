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

#include <json.hpp>
#include <string>

#include "p2b/code_bandit.hpp"
#include "p2b/linucb.hpp"

namespace p2b {

/// Versioned JSON snapshot of agent statistics, used to distribute
/// warm-start state: {version, dim, actions, alpha, A, b} with matrices as
/// row-major nested arrays.
inline std::string linucb_to_json(const LinUcbD& agent) {
  nlohmann::json j;
  j["version"] = 1;
  j["dim"] = agent.dim();
  j["actions"] = agent.actions();
  j["alpha"] = agent.alpha();
  auto designs = nlohmann::json::array();
  auto responses = nlohmann::json::array();
  for (int a = 0; a < agent.actions(); ++a) {
    auto mat = nlohmann::json::array();
    for (int r = 0; r < agent.dim(); ++r) {
      auto row = nlohmann::json::array();
      for (int c = 0; c < agent.dim(); ++c) row.push_back(agent.design(a)(r, c));
      mat.push_back(std::move(row));
    }
    designs.push_back(std::move(mat));
    auto vec = nlohmann::json::array();
    for (int r = 0; r < agent.dim(); ++r) vec.push_back(agent.response(a)[r]);
    responses.push_back(std::move(vec));
  }
  j["A"] = std::move(designs);
  j["b"] = std::move(responses);
  return j.dump();
}

inline LinUcbD linucb_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::runtime_error("linucb_from_json: unsupported version");
  const int dim = j.at("dim").get<int>();
  const int actions = j.at("actions").get<int>();
  const double alpha = j.at("alpha").get<double>();
  std::vector<Eigen::MatrixXd> design;
  std::vector<Eigen::VectorXd> response;
  for (int a = 0; a < actions; ++a) {
    Eigen::MatrixXd m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        m(r, c) = j.at("A")[a][r][c].get<double>();
    design.push_back(std::move(m));
    Eigen::VectorXd v(dim);
    for (int r = 0; r < dim; ++r) v[r] = j.at("b")[a][r].get<double>();
    response.push_back(std::move(v));
  }
  return LinUcbD::from_state(dim, actions, alpha, std::move(design),
                             std::move(response));
}

/// Code-space snapshot: diagonal design plus response per action.
inline std::string code_linucb_to_json(const CodeLinUcbD& agent) {
  nlohmann::json j;
  j["version"] = 1;
  j["codes"] = agent.codes();
  j["actions"] = agent.actions();
  j["alpha"] = agent.alpha();
  auto diag = nlohmann::json::array();
  auto resp = nlohmann::json::array();
  for (int a = 0; a < agent.actions(); ++a) {
    auto drow = nlohmann::json::array();
    auto rrow = nlohmann::json::array();
    for (int c = 0; c < agent.codes(); ++c) {
      drow.push_back(agent.design_diagonal(a)[c]);
      rrow.push_back(agent.response(a)[c]);
    }
    diag.push_back(std::move(drow));
    resp.push_back(std::move(rrow));
  }
  j["A_diag"] = std::move(diag);
  j["b"] = std::move(resp);
  return j.dump();
}

inline CodeLinUcbD code_linucb_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::runtime_error("code_linucb_from_json: unsupported version");
  const int codes = j.at("codes").get<int>();
  const int actions = j.at("actions").get<int>();
  const double alpha = j.at("alpha").get<double>();
  std::vector<Eigen::VectorXd> diagonal;
  std::vector<Eigen::VectorXd> response;
  for (int a = 0; a < actions; ++a) {
    Eigen::VectorXd d(codes);
    Eigen::VectorXd b(codes);
    for (int c = 0; c < codes; ++c) {
      d[c] = j.at("A_diag")[a][c].get<double>();
      b[c] = j.at("b")[a][c].get<double>();
    }
    diagonal.push_back(std::move(d));
    response.push_back(std::move(b));
  }
  return CodeLinUcbD::from_state(codes, actions, alpha, std::move(diagonal),
                                 std::move(response));
}

}  // namespace p2b
