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

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "p2b/code_bandit.hpp"
#include "p2b/rng.hpp"

namespace p2b {

/// Report as submitted by a local agent, metadata still attached.
struct ReportPayload {
  int code = 0;
  int action = 0;
  int reward = 0;
  std::string agent_tag;  // transport metadata, stripped by the shuffler
};

/// Anonymized tuple. Deliberately has no field that could carry an agent
/// identifier; everything downstream of anonymize() uses this type only.
struct InteractionTuple {
  int code = 0;
  int action = 0;
  int reward = 0;
};

/// Bernoulli participation gate. Positive and negative rewards are sampled
/// at separate rates so the accountant can reason about both.
inline bool maybe_report(Rng& rng, double p_positive, double p_negative,
                         int reward) {
  if (!(p_positive >= 0.0 && p_positive <= 1.0) ||
      !(p_negative >= 0.0 && p_negative <= 1.0))
    throw std::domain_error("maybe_report: probabilities must lie in [0, 1]");
  return rng.bernoulli(reward == 1 ? p_positive : p_negative);
}

/// Strips all metadata; order and multiplicity are preserved.
inline std::vector<InteractionTuple> anonymize(
    const std::vector<ReportPayload>& batch) {
  std::vector<InteractionTuple> out;
  out.reserve(batch.size());
  for (const auto& p : batch)
    out.push_back(InteractionTuple{p.code, p.action, p.reward});
  return out;
}

/// Fisher-Yates shuffle driven by the given stream; uniform over
/// permutations.
template <typename T>
void shuffle_tuples(Rng& rng, std::vector<T>& tuples) {
  for (size_t i = tuples.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_below(i));
    std::swap(tuples[i - 1], tuples[j]);
  }
}

struct RefinedBatch {
  std::vector<InteractionTuple> tuples;
  int threshold_used = 1;
  std::uint64_t dropped_count = 0;
};

/// Keeps exactly the tuples whose code appears at least `threshold` times in
/// the batch; survivor order is preserved.
inline RefinedBatch apply_threshold(const std::vector<InteractionTuple>& tuples,
                                    int threshold) {
  if (threshold < 1) throw std::domain_error("apply_threshold: threshold must be >= 1");
  std::unordered_map<int, int> counts;
  for (const auto& t : tuples) counts[t.code]++;
  RefinedBatch out;
  out.threshold_used = threshold;
  for (const auto& t : tuples) {
    if (counts[t.code] >= threshold)
      out.tuples.push_back(t);
    else
      out.dropped_count++;
  }
  return out;
}

/// Trusted shuffler modeled in process: buffers payloads and, once the batch
/// size is reached, anonymizes, shuffles, and thresholds. A networked or
/// enclave-backed implementation could replace this behind the same
/// interface. Residual reports below a full batch are never flushed
/// implicitly; flush() exists for callers that want them.
class Shuffler {
 public:
  Shuffler(int batch_size, int threshold, std::uint64_t seed)
      : batch_size_(batch_size), threshold_(threshold), rng_(seed) {
    if (batch_size < 1) throw std::domain_error("Shuffler: batch size must be >= 1");
    if (threshold < 1) throw std::domain_error("Shuffler: threshold must be >= 1");
  }

  std::optional<RefinedBatch> submit(ReportPayload payload) {
    buffer_.push_back(std::move(payload));
    if (static_cast<int>(buffer_.size()) >= batch_size_) return flush();
    return std::nullopt;
  }

  std::optional<RefinedBatch> flush() {
    if (buffer_.empty()) return std::nullopt;
    auto tuples = anonymize(buffer_);
    buffer_.clear();
    shuffle_tuples(rng_, tuples);
    return apply_threshold(tuples, threshold_);
  }

  size_t pending() const { return buffer_.size(); }

 private:
  int batch_size_;
  int threshold_;
  Rng rng_;
  std::vector<ReportPayload> buffer_;
};

/// Server-side model over the code space plus a version counter that
/// increases on every ingested batch.
struct GlobalCodeModel {
  CodeLinUcbD bandit;
  std::int64_t version = 0;
};

/// Folds a refined batch into the global model, treating each tuple as a
/// one-hot context over the code space. Batches containing a code outside
/// [0, k) signal an encoder/model mismatch and are rejected atomically.
inline void server_ingest(GlobalCodeModel& model, const RefinedBatch& batch) {
  for (const auto& t : batch.tuples)
    if (t.code < 0 || t.code >= model.bandit.codes())
      throw std::out_of_range("server_ingest: code " + std::to_string(t.code) +
                              " outside [0, " +
                              std::to_string(model.bandit.codes()) +
                              "); batch rejected");
  for (const auto& t : batch.tuples) model.bandit.update(t.code, t.action, t.reward);
  model.version++;
}

/// Deep copy of the global bandit handed to a joining agent; local updates
/// never touch the server state.
inline CodeLinUcbD warm_start(const GlobalCodeModel& model) {
  return model.bandit;
}

/// Audit log: one header line per batch followed by its tuples.
inline void write_batch_log(std::ostream& out, const RefinedBatch& batch,
                            std::int64_t batch_index) {
  out << "# batch=" << batch_index << " threshold=" << batch.threshold_used
      << " dropped=" << batch.dropped_count << "\n";
  for (const auto& t : batch.tuples)
    out << t.code << ',' << t.action << ',' << t.reward << "\n";
}

}  // namespace p2b
