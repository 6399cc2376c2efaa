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

#include "p2b/context.hpp"

namespace p2b {

/// A code in [0, k) produced by the context encoder.
struct EncodedContext {
  int code = 0;
};

/// Trained nearest-centroid encoder over the normalized fixed-precision
/// grid. Immutable after training; safe to share across threads.
struct EncoderModel {
  int d = 0;
  int q = 1;
  int k = 1;
  Eigen::MatrixXd centroids;  // k x d
  std::uint64_t min_cluster_size = 0;
  std::uint64_t seed = 0;
  bool converged = false;
};

struct TrainOptions {
  std::uint64_t samples = 100'000;  // draws used when the grid exceeds the cap
  int max_iterations = 300;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

/// Index of the Euclidean-nearest centroid, lowest index on ties. One pass
/// over the k centroids, O(k d).
int nearest_centroid(const Eigen::MatrixXd& centroids,
                     const Eigen::Ref<const Eigen::VectorXd>& x);

/// Lloyd's k-means with k-means++ seeding over the full enumerated grid when
/// it fits under the enumeration cap, otherwise over uniform grid draws.
/// Deterministic for a fixed seed. min_cluster_size counts the assignment of
/// every training point to the final centroids.
EncoderModel train_encoder(int d, int q, int k, std::uint64_t samples,
                           std::uint64_t seed, const TrainOptions& options = {});

EncodedContext encode(const EncoderModel& model,
                      const Eigen::Ref<const Eigen::VectorXd>& x);
EncodedContext encode(const EncoderModel& model, const ContextVector& x);

/// Cluster sizes from assigning each row of `points` to its nearest centroid.
std::vector<std::uint64_t> cluster_sizes(const Eigen::MatrixXd& centroids,
                                         const Eigen::MatrixXd& points);

/// Versioned JSON serialization.
std::string encoder_to_json(const EncoderModel& model);
EncoderModel encoder_from_json(const std::string& text);
void save_encoder(const EncoderModel& model, const std::string& path);
EncoderModel load_encoder(const std::string& path);

}  // namespace p2b
