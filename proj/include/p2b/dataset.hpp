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
#include <cstdint>
#include <string>
#include <vector>

namespace p2b {

struct MultiLabelInstance {
  Eigen::VectorXd features;
  std::vector<int> labels;  // sorted, each in [0, actions)
};

struct MultiLabelDataset {
  std::vector<MultiLabelInstance> instances;
  int d = 0;
  int actions = 0;
};

/// 1 iff the proposed action is in the instance's label set.
inline int multilabel_reward(const MultiLabelInstance& instance, int proposed) {
  for (int l : instance.labels)
    if (l == proposed) return 1;
  return 0;
}

/// Loads delimited multi-label data. Expected layout:
///   # d=<d> actions=<A>          manifest line
///   header row                   ignored
///   f1,...,fd,y1,...,yA          feature columns then 0/1 label columns
/// Comma and tab delimiters are both accepted.
MultiLabelDataset load_multilabel(const std::string& path);

struct HashedCategoricals {
  std::vector<int> labels;  // 1-based by descending frequency; 0 if dropped
  std::vector<bool> kept;
};

/// Reduces each record's categorical fields to one feature-hash code, ranks
/// codes by frequency, and labels the top_n codes 1..top_n (label 1 = most
/// frequent; ties broken by smaller code). Records outside the top_n are
/// marked dropped.
HashedCategoricals hash_categoricals(
    const std::vector<std::vector<std::string>>& records, int top_n,
    std::uint64_t buckets = 1u << 20);

/// Stable 64-bit FNV-1a over the concatenated fields (unit-separator joined).
std::uint64_t feature_hash(const std::vector<std::string>& fields);

/// Loads ad-style delimited data: one label column (0/1 click), then numeric
/// columns, then categorical columns. The first d_numeric numeric columns
/// become features; categorical columns are hashed into top_n product
/// labels. Each kept record becomes an instance whose single label is the
/// hashed product category (0-based), used as the logged action.
MultiLabelDataset load_addata(const std::string& path, int numeric_columns,
                              int d_numeric, int top_n,
                              std::uint64_t buckets = 1u << 20);

/// Per-column min-max scaling to [0,1] in place; constant columns become 0.
void min_max_scale(std::vector<MultiLabelInstance>& instances);

}  // namespace p2b
