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

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "p2b/encoder.hpp"
#include "p2b/experiment.hpp"
#include "p2b/privacy.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int cmd_build_encoder(int d, int q, int k, std::uint64_t seed,
                      std::uint64_t train_samples, std::uint64_t enum_cap,
                      const std::string& out_path) {
  p2b::TrainOptions opts;
  opts.samples = train_samples;
  opts.enumeration_cap = enum_cap;
  const auto model = p2b::train_encoder(d, q, k, train_samples, seed, opts);
  p2b::save_encoder(model, out_path);

  const auto n = p2b::cardinality(d, q);
  std::cout << "n=" << n.to_string() << " k=" << k
            << " min_cluster_size=" << model.min_cluster_size
            << " converged=" << (model.converged ? "true" : "false") << "\n";
  std::cout << "wrote " << out_path << "\n";
  std::cout << "crowd size l = floor(u / k) for sample user counts:\n";
  for (const std::int64_t u : {1000LL, 10000LL, 100000LL, 1000000LL}) {
    if (u < k) {
      std::cout << "  u=" << u << " l=- (u < k; match l to the shuffler threshold)\n";
    } else {
      std::cout << "  u=" << u << " l=" << p2b::crowd_blending_l(u, k) << "\n";
    }
  }
  return kExitOk;
}

int cmd_privacy(std::vector<double> p_grid, std::vector<std::int64_t> l_values,
                double omega_c, double epsilon_bar, std::int64_t u,
                const std::string& out_path) {
  for (const double p : p_grid)
    if (!(p >= 0.0 && p < 1.0))
      throw p2b::ValidationError({"p: grid values must lie in [0, 1)"});
  std::sort(p_grid.begin(), p_grid.end());
  std::sort(l_values.begin(), l_values.end());

  std::ostringstream csv;
  csv << "p,epsilon_bar,epsilon,l,omega_c,delta,delta_ok\n";
  for (const double p : p_grid) {
    const double eps = p2b::epsilon_of(p, epsilon_bar);
    if (l_values.empty()) {
      csv << fixed6(p) << ',' << fixed6(epsilon_bar) << ',' << fixed6(eps)
          << ",,,,\n";
      continue;
    }
    for (const auto l : l_values) {
      const double delta = p2b::delta_of(l, p, omega_c);
      csv << fixed6(p) << ',' << fixed6(epsilon_bar) << ',' << fixed6(eps)
          << ',' << l << ',' << fixed6(omega_c) << ',' << fixed6(delta) << ',';
      if (u > 0)
        csv << (p2b::delta_check(delta, u) ? "true" : "false");
      csv << "\n";
    }
  }

  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << csv.str();
    std::cout << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_run(const p2b::ExperimentConfig& config, bool dump_config) {
  if (dump_config) {
    std::cout << p2b::serialize_config(config);
    return kExitOk;
  }
  const auto result = p2b::run_experiment(config);
  std::ofstream out(config.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + config.out_path);
  p2b::write_metric_csv(out, result);
  out.close();

  std::cout << "wrote " << config.out_path << "\n";
  for (const auto& [setting, version] : result.final_version)
    std::cout << setting << ": global model version " << version << "\n";
  const auto& p = result.privacy;
  std::cout << "privacy: p_worst=" << fixed6(p.p_worst)
            << " epsilon=" << fixed6(p.epsilon) << " l=" << p.l
            << " delta_rel=" << fixed6(p.delta)
            << " delta_ok=" << (p.delta_ok ? "true" : "false") << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p2b: privacy-preserving contextual bandit experiments"};
  app.require_subcommand(1);

  // ---- build-encoder ----
  auto* build = app.add_subcommand(
      "build-encoder", "Train a k-means context encoder and write it as JSON");
  int be_d = 3, be_q = 1, be_k = 6;
  std::uint64_t be_seed = 0, be_train_samples = 100'000,
                be_cap = p2b::kDefaultEnumerationCap;
  std::string be_out = "encoder.json";
  build->add_option("--d", be_d, "context dimension");
  build->add_option("--q", be_q, "decimal precision of context entries");
  build->add_option("--k", be_k, "number of codes (bin size)");
  build->add_option("--seed", be_seed, "training seed");
  build->add_option("--train-samples", be_train_samples,
                    "grid draws used when the full grid exceeds the cap");
  build->add_option("--enum-cap", be_cap, "grid enumeration cap");
  build->add_option("--out", be_out, "output model path");

  // ---- run ----
  auto* run = app.add_subcommand("run", "Run the simulation and write metric CSV");
  std::string run_config_path, run_env, run_setting, run_private_context;
  std::string run_data, run_encoder, run_out, run_batch_log;
  std::vector<std::int64_t> run_checkpoints;
  bool dump_config = false;
  int r_d = 0, r_q = 0, r_k = 0, r_actions = 0, r_samples = 0, r_threshold = 0,
      r_batch = 0, r_eval_users = 0, r_numeric_cols = 0;
  std::int64_t r_users = 0;
  double r_alpha = 0, r_p = 0, r_neg = 0, r_beta = 0, r_sigma2 = 0, r_omega = 0;
  std::uint64_t r_seed = 0, r_train_samples = 0, r_cap = 0;
  run->add_option("--config", run_config_path, "key=value configuration file");
  run->add_option("--env", run_env, "synthetic|multilabel|addata");
  run->add_option("--d", r_d, "context dimension");
  run->add_option("--q", r_q, "decimal precision");
  run->add_option("--k", r_k, "number of codes");
  run->add_option("--actions", r_actions, "number of actions");
  run->add_option("--users", r_users, "number of users u");
  run->add_option("--samples", r_samples, "interactions per user t");
  run->add_option("--alpha", r_alpha, "LinUCB exploration weight");
  run->add_option("--cb-sampling-rate", r_p, "participation probability p");
  run->add_option("--cb-context-threshold", r_threshold, "shuffler threshold l");
  run->add_option("--neg-rew-sam-rate", r_neg,
                  "participation probability on negative reward");
  run->add_option("--beta", r_beta, "synthetic reward scaling factor");
  run->add_option("--sigma2", r_sigma2, "synthetic reward noise variance");
  run->add_option("--batch", r_batch, "shuffler batch size");
  run->add_option("--omega-c", r_omega, "delta exponent constant");
  run->add_option("--seed", r_seed, "master seed (overrides P2B_SEED)");
  run->add_option("--setting", run_setting,
                  "cold|warm-nonprivate|warm-private|all");
  run->add_option("--data", run_data, "dataset path (multilabel/addata)");
  run->add_option("--encoder", run_encoder, "pre-trained encoder model path");
  run->add_option("--out", run_out, "metric CSV output path");
  run->add_option("--batch-log", run_batch_log, "shuffler audit log path");
  run->add_option("--checkpoints", run_checkpoints,
                  "user-count checkpoints (default: 1-2-5 ladder)");
  run->add_option("--eval-users", r_eval_users, "probe cohort size (synthetic)");
  run->add_option("--private-context", run_private_context, "onehot|centroid");
  run->add_option("--train-samples", r_train_samples,
                  "encoder training draws when the grid exceeds the cap");
  run->add_option("--enum-cap", r_cap, "grid enumeration cap");
  run->add_option("--addata-numeric-columns", r_numeric_cols,
                  "total numeric columns in ad data files");
  run->add_flag("--dump-config", dump_config,
                "print the effective configuration and exit");

  // ---- privacy ----
  auto* privacy = app.add_subcommand(
      "privacy", "Print (p, epsilon) and optional (l, delta) tables as CSV");
  std::vector<double> pv_grid;
  std::vector<std::int64_t> pv_l;
  double pv_omega = 1.0, pv_eps_bar = 0.0;
  std::int64_t pv_u = 0;
  std::string pv_out;
  privacy->add_option("--p", pv_grid, "sampling probabilities")->required();
  privacy->add_option("--l", pv_l, "crowd sizes for delta columns");
  privacy->add_option("--omega-c", pv_omega, "delta exponent constant");
  privacy->add_option("--epsilon-bar", pv_eps_bar, "crowd-blending epsilon");
  privacy->add_option("--u", pv_u, "user count for the delta <= 1/u check");
  privacy->add_option("--out", pv_out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (build->parsed())
      return cmd_build_encoder(be_d, be_q, be_k, be_seed, be_train_samples,
                               be_cap, be_out);
    if (privacy->parsed())
      return cmd_privacy(pv_grid, pv_l, pv_omega, pv_eps_bar, pv_u, pv_out);

    p2b::ExperimentConfig config;
    if (!run_config_path.empty())
      config = p2b::load_config_file(run_config_path, config);
    if (run->count("--env")) config.env = [&] {
      p2b::ExperimentConfig tmp = p2b::parse_config_text("env=" + run_env);
      return tmp.env;
    }();
    if (run->count("--d")) config.d = r_d;
    if (run->count("--q")) config.q = r_q;
    if (run->count("--k")) config.k = r_k;
    if (run->count("--actions")) config.actions = r_actions;
    if (run->count("--users")) config.users = r_users;
    if (run->count("--samples")) config.samples = r_samples;
    if (run->count("--alpha")) config.alpha = r_alpha;
    if (run->count("--cb-sampling-rate")) config.cb_sampling_rate = r_p;
    if (run->count("--cb-context-threshold"))
      config.cb_context_threshold = r_threshold;
    if (run->count("--neg-rew-sam-rate")) config.neg_rew_sam_rate = r_neg;
    if (run->count("--beta")) config.beta = r_beta;
    if (run->count("--sigma2")) config.sigma2 = r_sigma2;
    if (run->count("--batch")) config.batch = r_batch;
    if (run->count("--omega-c")) config.omega_c = r_omega;
    if (run->count("--checkpoints")) config.checkpoints = run_checkpoints;
    if (run->count("--setting"))
      config.settings = p2b::parse_config_text("setting=" + run_setting).settings;
    if (run->count("--data")) config.data_path = run_data;
    if (run->count("--encoder")) config.encoder_path = run_encoder;
    if (run->count("--out")) config.out_path = run_out;
    if (run->count("--batch-log")) config.batch_log_path = run_batch_log;
    if (run->count("--eval-users")) config.eval_users = r_eval_users;
    if (run->count("--private-context"))
      config.private_context =
          p2b::parse_config_text("private_context=" + run_private_context)
              .private_context;
    if (run->count("--train-samples")) config.train_samples = r_train_samples;
    if (run->count("--enum-cap")) config.enumeration_cap = r_cap;
    if (run->count("--addata-numeric-columns"))
      config.addata_numeric_columns = r_numeric_cols;

    if (run->count("--seed")) {
      config.seed = r_seed;
    } else if (const char* env_seed = std::getenv("P2B_SEED")) {
      config.seed = std::stoull(env_seed);
    }

    const auto errors = p2b::validate_config(config);
    if (!errors.empty()) {
      for (const auto& e : errors) std::cerr << "error: " << e << "\n";
      return kExitValidation;
    }
    return cmd_run(config, dump_config);
  } catch (const p2b::ValidationError& e) {
    for (const auto& issue : e.issues) std::cerr << "error: " << issue << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
