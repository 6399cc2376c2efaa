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

#include "p2b/encoder.hpp"

#include <fstream>
#include <json.hpp>
#include <limits>
#include <stdexcept>

#include "p2b/rng.hpp"

namespace p2b {
namespace {

// Nearest-centroid assignment for every row of `points`, lowest index on
// ties. Distances ||p||^2 - 2 p.c + ||c||^2 come from a matrix product over
// row blocks so memory stays O(block * k) rather than O(n * k).
void assign_blockwise(const Eigen::MatrixXd& points,
                      const Eigen::MatrixXd& centroids,
                      std::vector<int>& assign, Eigen::VectorXd& dist2) {
  constexpr Eigen::Index kBlock = 4096;
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centroids.rows();
  assign.resize(static_cast<size_t>(n));
  dist2.resize(n);
  const Eigen::RowVectorXd c_sq =
      centroids.rowwise().squaredNorm().transpose();
  for (Eigen::Index start = 0; start < n; start += kBlock) {
    const Eigen::Index len = std::min(kBlock, n - start);
    const auto rows = points.middleRows(start, len);
    Eigen::MatrixXd d2 = -2.0 * rows * centroids.transpose();
    d2.colwise() += rows.rowwise().squaredNorm();
    d2.rowwise() += c_sq;
    for (Eigen::Index i = 0; i < len; ++i) {
      int best = 0;
      double best_d = d2(i, 0);
      for (Eigen::Index j = 1; j < k; ++j) {
        if (d2(i, j) < best_d) {
          best_d = d2(i, j);
          best = static_cast<int>(j);
        }
      }
      assign[static_cast<size_t>(start + i)] = best;
      dist2[start + i] = std::max(best_d, 0.0);
    }
  }
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  const Eigen::Index first = static_cast<Eigen::Index>(
      rng.uniform_below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = points.row(first);

  Eigen::VectorXd min_d2 =
      (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = min_d2.sum();
    Eigen::Index chosen;
    if (total <= 0.0) {
      chosen = static_cast<Eigen::Index>(
          rng.uniform_below(static_cast<std::uint64_t>(n)));
    } else {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += min_d2[i];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    }
    centroids.row(c) = points.row(chosen);
    min_d2 = min_d2.cwiseMin(
        (points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace

int nearest_centroid(const Eigen::MatrixXd& centroids,
                     const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != centroids.cols())
    throw std::invalid_argument("nearest_centroid: dimension mismatch");
  int best = 0;
  double best_d = (centroids.row(0).transpose() - x).squaredNorm();
  for (Eigen::Index j = 1; j < centroids.rows(); ++j) {
    const double d = (centroids.row(j).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

std::vector<std::uint64_t> cluster_sizes(const Eigen::MatrixXd& centroids,
                                         const Eigen::MatrixXd& points) {
  // Uses the exact per-point rule of nearest_centroid so the census always
  // agrees with encode() on knife-edge ties.
  std::vector<std::uint64_t> sizes(static_cast<size_t>(centroids.rows()), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    sizes[static_cast<size_t>(
        nearest_centroid(centroids, points.row(i).transpose()))]++;
  return sizes;
}

EncoderModel train_encoder(int d, int q, int k, std::uint64_t samples,
                           std::uint64_t seed, const TrainOptions& options) {
  check_dims(d, q);
  if (k < 1) throw std::domain_error("train_encoder: k must be >= 1");
  const BigUint n = cardinality(d, q);
  if (n.fits_uint64() && static_cast<std::uint64_t>(k) > n.as_uint64()) {
    throw std::domain_error("train_encoder: k = " + std::to_string(k) +
                            " exceeds the n = " + n.to_string() +
                            " distinct contexts at d = " + std::to_string(d) +
                            ", q = " + std::to_string(q));
  }

  Rng rng(seed);
  Eigen::MatrixXd points;
  if (!n.exceeds(options.enumeration_cap)) {
    points = grid_matrix(d, q, options.enumeration_cap);
  } else {
    if (samples == 0)
      throw std::domain_error("train_encoder: samples must be >= 1 when the grid exceeds the cap");
    const double scale = static_cast<double>(pow10i(q));
    points.resize(static_cast<Eigen::Index>(samples), d);
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      points.row(i) = sample_grid_point(rng, d, q).cast<double>().transpose() / scale;
  }

  EncoderModel model;
  model.d = d;
  model.q = q;
  model.k = k;
  model.seed = seed;
  model.centroids = kmeanspp_init(points, k, rng);

  std::vector<int> assign;
  std::vector<int> prev_assign;
  Eigen::VectorXd dist2;
  std::vector<std::int64_t> counts(static_cast<size_t>(k));
  model.converged = false;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    assign_blockwise(points, model.centroids, assign, dist2);
    if (assign == prev_assign) {
      model.converged = true;
      break;
    }
    prev_assign = assign;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const int a = assign[static_cast<size_t>(i)];
      sums.row(a) += points.row(i);
      counts[static_cast<size_t>(a)]++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        model.centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<size_t>(c)]);
      } else {
        // Re-seed an empty cluster with the point farthest from its current
        // centroid (max distance, lowest index on ties). Consuming the
        // chosen point's distance keeps a second empty cluster in the same
        // iteration from picking the same point.
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
          if (dist2[i] > far_d) {
            far_d = dist2[i];
            far = i;
          }
        }
        model.centroids.row(c) = points.row(far);
        dist2[far] = -1.0;
      }
    }
  }

  const auto sizes = cluster_sizes(model.centroids, points);
  model.min_cluster_size = *std::min_element(sizes.begin(), sizes.end());
  return model;
}

EncodedContext encode(const EncoderModel& model,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.d)
    throw std::invalid_argument("encode: context dimension mismatch");
  return EncodedContext{nearest_centroid(model.centroids, x)};
}

EncodedContext encode(const EncoderModel& model, const ContextVector& x) {
  return encode(model, Eigen::VectorXd(x.to_real()));
}

std::string encoder_to_json(const EncoderModel& model) {
  nlohmann::json j;
  j["version"] = 1;
  j["d"] = model.d;
  j["q"] = model.q;
  j["k"] = model.k;
  j["min_cluster_size"] = model.min_cluster_size;
  j["seed"] = model.seed;
  j["converged"] = model.converged;
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < model.centroids.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < model.centroids.cols(); ++c)
      row.push_back(model.centroids(r, c));
    rows.push_back(std::move(row));
  }
  j["centroids"] = std::move(rows);
  return j.dump(2);
}

EncoderModel encoder_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::runtime_error("encoder_from_json: unsupported version");
  EncoderModel model;
  model.d = j.at("d").get<int>();
  model.q = j.at("q").get<int>();
  model.k = j.at("k").get<int>();
  model.min_cluster_size = j.at("min_cluster_size").get<std::uint64_t>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.converged = j.at("converged").get<bool>();
  const auto& rows = j.at("centroids");
  model.centroids.resize(model.k, model.d);
  if (static_cast<int>(rows.size()) != model.k)
    throw std::runtime_error("encoder_from_json: centroid count mismatch");
  for (int r = 0; r < model.k; ++r) {
    const auto& row = rows[static_cast<size_t>(r)];
    if (static_cast<int>(row.size()) != model.d)
      throw std::runtime_error("encoder_from_json: centroid dimension mismatch");
    for (int c = 0; c < model.d; ++c)
      model.centroids(r, c) = row[static_cast<size_t>(c)].get<double>();
  }
  return model;
}

void save_encoder(const EncoderModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_encoder: cannot open " + path);
  out << encoder_to_json(model) << "\n";
}

EncoderModel load_encoder(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_encoder: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return encoder_from_json(text);
}

}  // namespace p2b
