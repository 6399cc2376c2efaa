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

#include "p2b/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "p2b/dataset.hpp"
#include "p2b/encoder.hpp"
#include "p2b/linucb.hpp"
#include "p2b/pipeline.hpp"
#include "p2b/privacy.hpp"
#include "p2b/synthetic.hpp"

namespace p2b {
namespace {

// Substream tags. Every source of randomness has its own stream keyed by
// (tag, index) so settings sharing a master seed see identical draws where
// the design calls for pairing (probe cohorts, per-user contexts).
constexpr std::uint64_t kTagEnv = 1;
constexpr std::uint64_t kTagEncoder = 2;
constexpr std::uint64_t kTagUserContext = 3;
constexpr std::uint64_t kTagUserNoise = 4;
constexpr std::uint64_t kTagUserReport = 5;
constexpr std::uint64_t kTagShuffler = 6;
constexpr std::uint64_t kTagProbeContext = 7;
constexpr std::uint64_t kTagProbeNoise = 8;
constexpr std::uint64_t kTagUserSamples = 9;
constexpr std::uint64_t kTagProbeSamples = 10;
constexpr std::uint64_t kTagSplit = 11;

std::string scaled_key(const Eigen::VectorXi& v) {
  std::string s(static_cast<size_t>(v.size()) * sizeof(int), '\0');
  std::memcpy(s.data(), v.data(), s.size());
  return s;
}

// `count` distinct indices from [0, n), in draw order.
std::vector<std::int64_t> sample_distinct(Rng& rng, std::int64_t n,
                                          std::int64_t count) {
  count = std::min(count, n);
  std::vector<std::int64_t> out;
  out.reserve(static_cast<size_t>(count));
  if (count * 3 >= n) {
    std::vector<std::int64_t> pool(static_cast<size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    for (std::int64_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::int64_t>(
                             rng.uniform_below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
      out.push_back(pool[static_cast<size_t>(i)]);
    }
  } else {
    std::unordered_set<std::int64_t> seen;
    while (static_cast<std::int64_t>(out.size()) < count) {
      const auto v = static_cast<std::int64_t>(
          rng.uniform_below(static_cast<std::uint64_t>(n)));
      if (seen.insert(v).second) out.push_back(v);
    }
  }
  return out;
}

struct DenseGlobalModel {
  LinUcbD bandit;
  std::int64_t version = 0;
};

class ExperimentEngine {
 public:
  explicit ExperimentEngine(const ExperimentConfig& cfg) : cfg_(cfg) {
    auto errors = validate_config(cfg_);
    if (!errors.empty()) throw ValidationError(std::move(errors));

    if (cfg_.env == EnvKind::kSynthetic) {
      env_.emplace(cfg_.d, cfg_.actions, cfg_.beta, cfg_.sigma2,
                   derive_seed(cfg_.seed, kTagEnv));
    } else {
      prepare_dataset();
    }
    if (needs_encoder()) prepare_encoder();
    if (cfg_.env != EnvKind::kSynthetic) prepare_instances();
    resolve_checkpoints();
  }

  RunResult run() {
    RunResult result;
    result.privacy = privacy_report(cfg_);
    for (const Setting s : canonical_settings()) {
      std::int64_t version = 0;
      result.curves.push_back(run_setting(s, &version));
      result.final_version[to_string(s)] = version;
    }
    return result;
  }

 private:
  bool needs_encoder() const {
    for (const Setting s : cfg_.settings)
      if (s == Setting::kCold || s == Setting::kWarmPrivate) return true;
    return false;
  }

  std::vector<Setting> canonical_settings() const {
    std::vector<Setting> order;
    for (const Setting s : {Setting::kCold, Setting::kWarmNonPrivate,
                            Setting::kWarmPrivate})
      if (std::find(cfg_.settings.begin(), cfg_.settings.end(), s) !=
          cfg_.settings.end())
        order.push_back(s);
    return order;
  }

  void prepare_encoder() {
    if (!cfg_.encoder_path.empty()) {
      encoder_ = load_encoder(cfg_.encoder_path);
      std::vector<std::string> problems;
      if (encoder_->d != cfg_.d)
        problems.push_back("encoder: file has d=" + std::to_string(encoder_->d) +
                           ", config has d=" + std::to_string(cfg_.d));
      if (encoder_->q != cfg_.q)
        problems.push_back("encoder: file has q=" + std::to_string(encoder_->q) +
                           ", config has q=" + std::to_string(cfg_.q));
      if (encoder_->k != cfg_.k)
        problems.push_back("encoder: file has k=" + std::to_string(encoder_->k) +
                           ", config has k=" + std::to_string(cfg_.k));
      if (!problems.empty()) throw ValidationError(std::move(problems));
    } else {
      TrainOptions opts;
      opts.samples = cfg_.train_samples;
      opts.enumeration_cap = cfg_.enumeration_cap;
      encoder_ = train_encoder(cfg_.d, cfg_.q, cfg_.k, cfg_.train_samples,
                               derive_seed(cfg_.seed, kTagEncoder), opts);
    }
  }

  void prepare_dataset() {
    if (cfg_.env == EnvKind::kMultiLabel) {
      dataset_ = load_multilabel(cfg_.data_path);
      std::vector<std::string> problems;
      if (dataset_.d != cfg_.d)
        problems.push_back("d: dataset declares d=" + std::to_string(dataset_.d) +
                           ", config has d=" + std::to_string(cfg_.d));
      if (dataset_.actions != cfg_.actions)
        problems.push_back("actions: dataset declares actions=" +
                           std::to_string(dataset_.actions) +
                           ", config has actions=" + std::to_string(cfg_.actions));
      if (!problems.empty()) throw ValidationError(std::move(problems));
    } else {
      dataset_ = load_addata(cfg_.data_path, cfg_.addata_numeric_columns, cfg_.d,
                             cfg_.actions);
    }
    if (dataset_.instances.empty())
      throw ValidationError({"data: dataset contains no usable instances"});
    min_max_scale(dataset_.instances);

    auto split = split_agents(cfg_.users, derive_seed(cfg_.seed, kTagSplit));
    train_agents_ = std::move(split.train);
    test_agents_ = std::move(split.test);
  }

  void prepare_instances() {
    instance_context_.reserve(dataset_.instances.size());
    for (const auto& inst : dataset_.instances) {
      Eigen::VectorXd raw = inst.features;
      if (raw.sum() <= 0.0) raw = Eigen::VectorXd::Ones(raw.size());
      instance_context_.push_back(normalize_and_round(raw, cfg_.q).to_real());
    }
    if (encoder_) {
      instance_code_.reserve(instance_context_.size());
      for (const auto& ctx : instance_context_)
        instance_code_.push_back(encode(*encoder_, ctx).code);
    }
  }

  void resolve_checkpoints() {
    const std::int64_t max_x = cfg_.env == EnvKind::kSynthetic
                                   ? cfg_.users
                                   : static_cast<std::int64_t>(train_agents_.size());
    if (!cfg_.checkpoints.empty()) {
      checkpoints_ = cfg_.checkpoints;
      std::sort(checkpoints_.begin(), checkpoints_.end());
      checkpoints_.erase(std::unique(checkpoints_.begin(), checkpoints_.end()),
                         checkpoints_.end());
      std::erase_if(checkpoints_, [max_x](std::int64_t v) { return v > max_x; });
    } else {
      // 1-2-5 ladder: 10, 20, 50, 100, ... below the final population size.
      for (std::int64_t decade = 10; decade < max_x; decade *= 10)
        for (const std::int64_t m : {1, 2, 5}) {
          const std::int64_t v = decade * m;
          if (v < max_x) checkpoints_.push_back(v);
        }
    }
    if (checkpoints_.empty() || checkpoints_.back() != max_x)
      checkpoints_.push_back(max_x);
  }

  int code_of_grid_point(const Eigen::VectorXi& scaled) {
    const std::string key = scaled_key(scaled);
    const auto it = grid_code_cache_.find(key);
    if (it != grid_code_cache_.end()) return it->second;
    const double scale = static_cast<double>(pow10i(cfg_.q));
    const int code =
        encode(*encoder_, Eigen::VectorXd(scaled.cast<double>() / scale)).code;
    grid_code_cache_.emplace(key, code);
    return code;
  }

  std::string metric_name() const {
    switch (cfg_.env) {
      case EnvKind::kSynthetic: return "avg_reward";
      case EnvKind::kMultiLabel: return "accuracy";
      case EnvKind::kAdData: return "ctr";
    }
    return "avg_reward";
  }

  std::vector<std::int64_t> agent_deck(std::uint64_t tag, std::uint64_t index) {
    Rng rng(derive_seed(cfg_.seed, tag, index));
    const auto n = static_cast<std::int64_t>(dataset_.instances.size());
    const std::int64_t want = std::min<std::int64_t>(
        {static_cast<std::int64_t>(cfg_.samples), 100, n});
    return sample_distinct(rng, n, want);
  }

  // ---- probes -------------------------------------------------------------
  // Evaluation agents are warm-started from the current global model and
  // never report. Their streams are keyed by probe ordinal only, so every
  // checkpoint (and every setting sharing the master seed) evaluates the
  // same cohort futures; an unchanged global model yields a bit-identical
  // metric by construction.

  template <typename SelectUpdate>
  double probe_synthetic(SelectUpdate&& make_agent) {
    double total = 0.0;
    std::int64_t steps = 0;
    const double scale = static_cast<double>(pow10i(cfg_.q));
    for (int i = 0; i < cfg_.eval_users; ++i) {
      Rng ctx_rng(derive_seed(cfg_.seed, kTagProbeContext,
                              static_cast<std::uint64_t>(i)));
      Rng noise_rng(derive_seed(cfg_.seed, kTagProbeNoise,
                                static_cast<std::uint64_t>(i)));
      auto agent = make_agent();
      for (int step = 0; step < cfg_.samples; ++step) {
        const Eigen::VectorXi scaled = sample_grid_point(ctx_rng, cfg_.d, cfg_.q);
        const Eigen::VectorXd x = scaled.cast<double>() / scale;
        const int action = agent.select(scaled, x);
        const int r = env_->reward(x, action, noise_rng);
        agent.update(scaled, x, action, r);
        total += r;
        ++steps;
      }
    }
    return steps > 0 ? total / static_cast<double>(steps) : 0.0;
  }

  template <typename SelectUpdate>
  double probe_dataset(SelectUpdate&& make_agent) {
    double total = 0.0;
    std::int64_t steps = 0;
    for (size_t i = 0; i < test_agents_.size(); ++i) {
      const auto deck = agent_deck(kTagProbeSamples, static_cast<std::uint64_t>(i));
      auto agent = make_agent();
      for (const auto inst_idx : deck) {
        const auto& inst = dataset_.instances[static_cast<size_t>(inst_idx)];
        const Eigen::VectorXd& x = instance_context_[static_cast<size_t>(inst_idx)];
        const int action = agent.select_instance(static_cast<size_t>(inst_idx), x);
        const int r = multilabel_reward(inst, action);
        agent.update_instance(static_cast<size_t>(inst_idx), x, action, r);
        total += r;
        ++steps;
      }
    }
    return steps > 0 ? total / static_cast<double>(steps) : 0.0;
  }

  // Probe agent adaptors: one code-based, one dense. `scaled` carries the
  // grid point for encoding; dense agents consume the real vector directly.
  struct CodedProbe {
    ExperimentEngine* eng;
    CodeLinUcbD agent;
    int select(const Eigen::VectorXi& scaled, const Eigen::VectorXd&) {
      return agent.select_action(eng->code_of_grid_point(scaled)).action;
    }
    void update(const Eigen::VectorXi& scaled, const Eigen::VectorXd&, int a, int r) {
      agent.update(eng->code_of_grid_point(scaled), a, r);
    }
    int select_instance(size_t idx, const Eigen::VectorXd&) {
      return agent.select_action(eng->instance_code_[idx]).action;
    }
    void update_instance(size_t idx, const Eigen::VectorXd&, int a, int r) {
      agent.update(eng->instance_code_[idx], a, r);
    }
  };

  struct DenseProbe {
    ExperimentEngine* eng;
    LinUcbD agent;
    bool via_centroid = false;
    Eigen::VectorXd ctx(const Eigen::VectorXi& scaled, const Eigen::VectorXd& x) {
      if (!via_centroid) return x;
      return eng->encoder_->centroids.row(eng->code_of_grid_point(scaled)).transpose();
    }
    Eigen::VectorXd ctx_instance(size_t idx, const Eigen::VectorXd& x) {
      if (!via_centroid) return x;
      return eng->encoder_->centroids.row(eng->instance_code_[idx]).transpose();
    }
    int select(const Eigen::VectorXi& scaled, const Eigen::VectorXd& x) {
      return agent.select_action(ctx(scaled, x)).action;
    }
    void update(const Eigen::VectorXi& scaled, const Eigen::VectorXd& x, int a, int r) {
      agent.update(ctx(scaled, x), a, r);
    }
    int select_instance(size_t idx, const Eigen::VectorXd& x) {
      return agent.select_action(ctx_instance(idx, x)).action;
    }
    void update_instance(size_t idx, const Eigen::VectorXd& x, int a, int r) {
      agent.update(ctx_instance(idx, x), a, r);
    }
  };

  // ---- per-setting run ----------------------------------------------------

  MetricCurve run_setting(Setting setting, std::int64_t* final_version) {
    const bool centroid_mode =
        cfg_.private_context == PrivateContextMode::kCentroid &&
        setting == Setting::kWarmPrivate;
    const bool coded = setting == Setting::kCold ||
                       (setting == Setting::kWarmPrivate && !centroid_mode);

    GlobalCodeModel code_global;
    DenseGlobalModel dense_global;
    if (coded) {
      code_global.bandit = CodeLinUcbD(cfg_.k, cfg_.actions, cfg_.alpha);
    } else {
      dense_global.bandit = LinUcbD(cfg_.d, cfg_.actions, cfg_.alpha);
    }

    Shuffler shuffler(cfg_.batch, cfg_.cb_context_threshold,
                      derive_seed(cfg_.seed, kTagShuffler));
    std::ofstream batch_log;
    if (!cfg_.batch_log_path.empty() && setting == Setting::kWarmPrivate) {
      batch_log.open(cfg_.batch_log_path);
      if (!batch_log)
        throw std::runtime_error("cannot open batch log " + cfg_.batch_log_path);
    }
    std::int64_t batches_flushed = 0;

    MetricCurve curve;
    curve.setting = to_string(setting);
    curve.seed = cfg_.seed;
    curve.metric = metric_name();

    // Probe values only change when the global model does.
    std::int64_t probed_version = -1;
    double probed_value = 0.0;
    auto probe = [&]() {
      const std::int64_t version = coded ? code_global.version : dense_global.version;
      if (version != probed_version) {
        probed_version = version;
        probed_value = run_probe(coded, centroid_mode, code_global, dense_global);
      }
      return probed_value;
    };

    if (setting == Setting::kCold) {
      // No communication: the global model never changes, so training users
      // cannot influence the evaluation cohort.
      for (const auto cp : checkpoints_) {
        curve.x.push_back(cp);
        curve.values.push_back(probe());
      }
      *final_version = 0;
      return curve;
    }

    std::int64_t processed = 0;
    size_t next_cp = 0;
    const std::int64_t total_train =
        cfg_.env == EnvKind::kSynthetic
            ? cfg_.users
            : static_cast<std::int64_t>(train_agents_.size());

    for (std::int64_t u = 0; u < total_train; ++u) {
      if (setting == Setting::kWarmPrivate) {
        run_private_user(u, centroid_mode, code_global, dense_global, shuffler,
                         batch_log, batches_flushed);
      } else {
        run_nonprivate_user(u, dense_global);
      }
      ++processed;
      while (next_cp < checkpoints_.size() && processed == checkpoints_[next_cp]) {
        curve.x.push_back(processed);
        curve.values.push_back(probe());
        ++next_cp;
      }
    }

    *final_version = coded ? code_global.version : dense_global.version;
    return curve;
  }

  double run_probe(bool coded, bool centroid_mode,
                   const GlobalCodeModel& code_global,
                   const DenseGlobalModel& dense_global) {
    if (coded) {
      auto make = [&]() { return CodedProbe{this, warm_start(code_global)}; };
      return cfg_.env == EnvKind::kSynthetic ? probe_synthetic(make)
                                             : probe_dataset(make);
    }
    auto make = [&]() {
      return DenseProbe{this, dense_global.bandit, centroid_mode};
    };
    return cfg_.env == EnvKind::kSynthetic ? probe_synthetic(make)
                                           : probe_dataset(make);
  }

  void run_private_user(std::int64_t u, bool centroid_mode,
                        GlobalCodeModel& code_global,
                        DenseGlobalModel& dense_global, Shuffler& shuffler,
                        std::ofstream& batch_log, std::int64_t& batches_flushed) {
    Rng report_rng(derive_seed(cfg_.seed, kTagUserReport,
                               static_cast<std::uint64_t>(u)));
    const std::string tag = "user-" + std::to_string(u);

    auto deliver = [&](int code, int action, int reward) {
      if (!maybe_report(report_rng, cfg_.cb_sampling_rate, cfg_.neg_rew_sam_rate,
                        reward))
        return;
      auto refined = shuffler.submit(ReportPayload{code, action, reward, tag});
      if (!refined) return;
      if (centroid_mode) {
        for (const auto& t : refined->tuples)
          dense_global.bandit.update(
              Eigen::VectorXd(encoder_->centroids.row(t.code).transpose()),
              t.action, t.reward);
        dense_global.version++;
      } else {
        server_ingest(code_global, *refined);
      }
      if (batch_log.is_open())
        write_batch_log(batch_log, *refined, batches_flushed);
      ++batches_flushed;
    };

    if (cfg_.env == EnvKind::kSynthetic) {
      Rng ctx_rng(derive_seed(cfg_.seed, kTagUserContext,
                              static_cast<std::uint64_t>(u)));
      Rng noise_rng(derive_seed(cfg_.seed, kTagUserNoise,
                                static_cast<std::uint64_t>(u)));
      const double scale = static_cast<double>(pow10i(cfg_.q));
      if (centroid_mode) {
        LinUcbD agent = dense_global.bandit;
        for (int step = 0; step < cfg_.samples; ++step) {
          const Eigen::VectorXi scaled = sample_grid_point(ctx_rng, cfg_.d, cfg_.q);
          const Eigen::VectorXd x = scaled.cast<double>() / scale;
          const int code = code_of_grid_point(scaled);
          const Eigen::VectorXd cx = encoder_->centroids.row(code).transpose();
          const int action = agent.select_action(cx).action;
          const int r = env_->reward(x, action, noise_rng);
          agent.update(cx, action, r);
          deliver(code, action, r);
        }
      } else {
        CodeLinUcbD agent = warm_start(code_global);
        for (int step = 0; step < cfg_.samples; ++step) {
          const Eigen::VectorXi scaled = sample_grid_point(ctx_rng, cfg_.d, cfg_.q);
          const Eigen::VectorXd x = scaled.cast<double>() / scale;
          const int code = code_of_grid_point(scaled);
          const int action = agent.select_action(code).action;
          const int r = env_->reward(x, action, noise_rng);
          agent.update(code, action, r);
          deliver(code, action, r);
        }
      }
      return;
    }

    const auto agent_id = train_agents_[static_cast<size_t>(u)];
    const auto deck = agent_deck(kTagUserSamples,
                                 static_cast<std::uint64_t>(agent_id));
    if (centroid_mode) {
      LinUcbD agent = dense_global.bandit;
      for (const auto idx : deck) {
        const auto& inst = dataset_.instances[static_cast<size_t>(idx)];
        const int code = instance_code_[static_cast<size_t>(idx)];
        const Eigen::VectorXd cx = encoder_->centroids.row(code).transpose();
        const int action = agent.select_action(cx).action;
        const int r = multilabel_reward(inst, action);
        agent.update(cx, action, r);
        deliver(code, action, r);
      }
    } else {
      CodeLinUcbD agent = warm_start(code_global);
      for (const auto idx : deck) {
        const auto& inst = dataset_.instances[static_cast<size_t>(idx)];
        const int code = instance_code_[static_cast<size_t>(idx)];
        const int action = agent.select_action(code).action;
        const int r = multilabel_reward(inst, action);
        agent.update(code, action, r);
        deliver(code, action, r);
      }
    }
  }

  void run_nonprivate_user(std::int64_t u, DenseGlobalModel& dense_global) {
    LinUcbD agent = dense_global.bandit;  // warm start
    std::vector<RewardObservation> batch;

    if (cfg_.env == EnvKind::kSynthetic) {
      Rng ctx_rng(derive_seed(cfg_.seed, kTagUserContext,
                              static_cast<std::uint64_t>(u)));
      Rng noise_rng(derive_seed(cfg_.seed, kTagUserNoise,
                                static_cast<std::uint64_t>(u)));
      const double scale = static_cast<double>(pow10i(cfg_.q));
      batch.reserve(static_cast<size_t>(cfg_.samples));
      for (int step = 0; step < cfg_.samples; ++step) {
        const Eigen::VectorXd x =
            sample_grid_point(ctx_rng, cfg_.d, cfg_.q).cast<double>() / scale;
        const int action = agent.select_action(x).action;
        const int r = env_->reward(x, action, noise_rng);
        agent.update(x, action, r);
        batch.push_back(RewardObservation{x, action, r});
      }
    } else {
      const auto agent_id = train_agents_[static_cast<size_t>(u)];
      const auto deck = agent_deck(kTagUserSamples,
                                   static_cast<std::uint64_t>(agent_id));
      batch.reserve(deck.size());
      for (const auto idx : deck) {
        const auto& inst = dataset_.instances[static_cast<size_t>(idx)];
        const Eigen::VectorXd& x = instance_context_[static_cast<size_t>(idx)];
        const int action = agent.select_action(x).action;
        const int r = multilabel_reward(inst, action);
        agent.update(x, action, r);
        batch.push_back(RewardObservation{x, action, r});
      }
    }

    // Original-form reporting: every interaction reaches the server.
    merge_statistics(dense_global.bandit, batch);
    dense_global.version++;
  }

  ExperimentConfig cfg_;
  std::optional<SyntheticEnv> env_;
  std::optional<EncoderModel> encoder_;
  MultiLabelDataset dataset_;
  std::vector<Eigen::VectorXd> instance_context_;
  std::vector<int> instance_code_;
  std::vector<std::int64_t> train_agents_;
  std::vector<std::int64_t> test_agents_;
  std::vector<std::int64_t> checkpoints_;
  std::unordered_map<std::string, int> grid_code_cache_;
};

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

AgentSplit split_agents(std::int64_t users, std::uint64_t seed) {
  if (users < 1) throw std::domain_error("split_agents: users must be >= 1");
  Rng rng(seed);
  std::vector<std::int64_t> perm(static_cast<size_t>(users));
  std::iota(perm.begin(), perm.end(), 0);
  for (size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[static_cast<size_t>(rng.uniform_below(i))]);
  const auto test_count = users * 3 / 10;
  const auto train_count = users - test_count;
  AgentSplit split;
  split.train.assign(perm.begin(), perm.begin() + train_count);
  split.test.assign(perm.begin() + train_count, perm.end());
  return split;
}

PrivacyReport privacy_report(const ExperimentConfig& config) {
  PrivacyReport report;
  report.p = config.cb_sampling_rate;
  report.p_negative = config.neg_rew_sam_rate;
  report.p_worst = worst_case_p(config.cb_sampling_rate, config.neg_rew_sam_rate);
  report.epsilon_bar = 0.0;  // identical codes within a crowd
  report.epsilon = epsilon_of(report.p_worst, report.epsilon_bar);
  report.l = config.cb_context_threshold;
  report.omega_c = config.omega_c;
  report.delta = delta_of(report.l, report.p_worst, report.omega_c);
  report.users = config.users;
  report.delta_ok = delta_check(report.delta, report.users);
  return report;
}

RunResult run_experiment(const ExperimentConfig& config) {
  ExperimentEngine engine(config);
  return engine.run();
}

void write_metric_csv(std::ostream& out, const RunResult& result) {
  out << "setting,seed,x,metric,value\n";
  for (const auto& curve : result.curves)
    for (size_t i = 0; i < curve.x.size(); ++i)
      out << curve.setting << ',' << curve.seed << ',' << curve.x[i] << ','
          << curve.metric << ',' << format_fixed(curve.values[i]) << "\n";
  const auto& p = result.privacy;
  out << "# privacy p=" << format_fixed(p.p)
      << " neg_rew_sam_rate=" << format_fixed(p.p_negative)
      << " p_worst=" << format_fixed(p.p_worst)
      << " epsilon_bar=" << format_fixed(p.epsilon_bar)
      << " epsilon=" << format_fixed(p.epsilon) << " l=" << p.l
      << " omega_c=" << format_fixed(p.omega_c)
      << " delta_rel=" << format_fixed(p.delta)
      << " delta_ok=" << (p.delta_ok ? "true" : "false") << " u=" << p.users
      << "\n";
}

}  // namespace p2b
