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
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "p2b/context.hpp"

namespace p2b {

enum class EnvKind { kSynthetic, kMultiLabel, kAdData };
enum class Setting { kCold, kWarmNonPrivate, kWarmPrivate };
enum class PrivateContextMode { kOneHot, kCentroid };

std::string to_string(EnvKind kind);
std::string to_string(Setting setting);
std::string to_string(PrivateContextMode mode);

/// Full parameter surface of one simulation run. Defaults follow the fixed
/// experimental values used throughout the evaluation: p = 0.5, q = 1,
/// alpha = 1, shuffler threshold 10, negative-reward sampling 5%.
struct ExperimentConfig {
  EnvKind env = EnvKind::kSynthetic;
  int d = 6;
  int q = 1;
  int k = 1024;
  int actions = 10;
  std::int64_t users = 10'000;  // u
  int samples = 10;             // t, interactions per user
  double alpha = 1.0;
  double cb_sampling_rate = 0.5;   // p, participation gate on positive reward
  double neg_rew_sam_rate = 0.05;  // participation gate on negative reward
  int cb_context_threshold = 10;   // shuffler threshold l
  double beta = 0.1;
  double sigma2 = 0.01;
  int batch = 1000;  // shuffler flush size B
  double omega_c = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;  // empty: 1-2-5 ladder up to u
  std::vector<Setting> settings = {Setting::kCold, Setting::kWarmNonPrivate,
                                   Setting::kWarmPrivate};
  std::string data_path;     // required for multilabel / addata
  std::string encoder_path;  // optional pre-trained encoder model
  std::string out_path = "metrics.csv";
  std::string batch_log_path;  // optional shuffler audit log
  int eval_users = 200;        // probe cohort size for the synthetic env
  PrivateContextMode private_context = PrivateContextMode::kOneHot;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  std::uint64_t train_samples = 100'000;  // encoder draws when grid > cap
  int addata_numeric_columns = 13;
};

/// All validation failures at once, one message per offending field.
struct ValidationError : std::runtime_error {
  explicit ValidationError(std::vector<std::string> problems);
  std::vector<std::string> issues;
};

/// Empty when the configuration is runnable.
std::vector<std::string> validate_config(const ExperimentConfig& config);

struct MetricCurve {
  std::string setting;
  std::uint64_t seed = 0;
  std::string metric;  // avg_reward | accuracy | ctr
  std::vector<std::int64_t> x;
  std::vector<double> values;
};

/// Seeded 70/30 partition of agent indices. Training agents are processed in
/// permutation order; the held-out 30% form the evaluation cohort.
struct AgentSplit {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> test;
};
AgentSplit split_agents(std::int64_t users, std::uint64_t seed);

struct PrivacyReport {
  double p = 0;
  double p_negative = 0;
  double p_worst = 0;
  double epsilon_bar = 0;
  double epsilon = 0;
  std::int64_t l = 1;
  double omega_c = 1;
  double delta = 0;  // relative delta unless omega_c is externally calibrated
  bool delta_ok = false;
  std::int64_t users = 0;
};

struct RunResult {
  std::vector<MetricCurve> curves;
  std::map<std::string, std::int64_t> final_version;  // per setting
  PrivacyReport privacy;
};

PrivacyReport privacy_report(const ExperimentConfig& config);

/// Runs the selected settings; deterministic for a fixed (config, seed).
RunResult run_experiment(const ExperimentConfig& config);

/// CSV rows `setting,seed,x,metric,value` followed by a `# privacy ...`
/// comment line recomputable from the configuration alone.
void write_metric_csv(std::ostream& out, const RunResult& result);

/// Flat key=value configuration files, `#` comments. parse over `base`
/// keeps unmentioned fields; serialize(parse(text)) is idempotent.
ExperimentConfig parse_config_text(const std::string& text,
                                   ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path,
                                  ExperimentConfig base = {});
std::string serialize_config(const ExperimentConfig& config);

}  // namespace p2b
