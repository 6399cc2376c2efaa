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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "p2b/experiment.hpp"

namespace p2b {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

EnvKind parse_env(const std::string& v) {
  if (v == "synthetic") return EnvKind::kSynthetic;
  if (v == "multilabel") return EnvKind::kMultiLabel;
  if (v == "addata") return EnvKind::kAdData;
  throw std::invalid_argument("unknown env '" + v +
                              "' (expected synthetic|multilabel|addata)");
}

std::vector<Setting> parse_settings(const std::string& v) {
  if (v == "all")
    return {Setting::kCold, Setting::kWarmNonPrivate, Setting::kWarmPrivate};
  if (v == "cold") return {Setting::kCold};
  if (v == "warm-nonprivate") return {Setting::kWarmNonPrivate};
  if (v == "warm-private") return {Setting::kWarmPrivate};
  throw std::invalid_argument(
      "unknown setting '" + v +
      "' (expected cold|warm-nonprivate|warm-private|all)");
}

PrivateContextMode parse_private_context(const std::string& v) {
  if (v == "onehot") return PrivateContextMode::kOneHot;
  if (v == "centroid") return PrivateContextMode::kCentroid;
  throw std::invalid_argument("unknown private_context '" + v +
                              "' (expected onehot|centroid)");
}

std::vector<std::int64_t> parse_checkpoints(const std::string& v) {
  std::vector<std::int64_t> out;
  std::istringstream in(v);
  std::string part;
  while (std::getline(in, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(std::stoll(part));
  }
  return out;
}

std::string settings_key(const std::vector<Setting>& settings) {
  if (settings.size() == 3) return "all";
  if (settings.size() == 1) return to_string(settings.front());
  std::string out;
  for (const auto& s : settings) {
    if (!out.empty()) out += "+";
    out += to_string(s);
  }
  return out;
}

}  // namespace

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kSynthetic: return "synthetic";
    case EnvKind::kMultiLabel: return "multilabel";
    case EnvKind::kAdData: return "addata";
  }
  return "synthetic";
}

std::string to_string(Setting setting) {
  switch (setting) {
    case Setting::kCold: return "cold";
    case Setting::kWarmNonPrivate: return "warm-nonprivate";
    case Setting::kWarmPrivate: return "warm-private";
  }
  return "cold";
}

std::string to_string(PrivateContextMode mode) {
  return mode == PrivateContextMode::kOneHot ? "onehot" : "centroid";
}

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error(problems.empty() ? "invalid configuration"
                                          : problems.front()),
      issues(std::move(problems)) {}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  auto req = [&errors](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };

  req(c.d >= 1, "d: must be >= 1");
  req(c.q >= 1 && c.q <= 9, "q: must lie in [1, 9]");
  req(c.k >= 1, "k: must be >= 1");
  if (c.d >= 1 && c.q >= 1 && c.q <= 9 && c.k >= 1) {
    const BigUint n = cardinality(c.d, c.q);
    if (n.fits_uint64() && static_cast<std::uint64_t>(c.k) > n.as_uint64())
      errors.push_back("k: " + std::to_string(c.k) + " exceeds the n = " +
                       n.to_string() + " distinct contexts at d = " +
                       std::to_string(c.d) + ", q = " + std::to_string(c.q));
  }
  req(c.actions >= 1, "actions: must be >= 1");
  req(c.users >= 1, "users: must be >= 1");
  req(c.samples >= 1, "samples: must be >= 1");
  req(c.alpha >= 0.0, "alpha: must be >= 0");
  req(c.cb_sampling_rate >= 0.0 && c.cb_sampling_rate < 1.0,
      "cb_sampling_rate: must lie in [0, 1)");
  req(c.neg_rew_sam_rate >= 0.0 && c.neg_rew_sam_rate < 1.0,
      "neg_rew_sam_rate: must lie in [0, 1)");
  req(c.cb_context_threshold >= 1, "cb_context_threshold: must be >= 1");
  req(c.beta >= 0.0 && c.beta <= 1.0, "beta: must lie in [0, 1]");
  req(c.sigma2 >= 0.0, "sigma2: must be >= 0");
  req(c.batch >= 1, "batch: must be >= 1");
  req(c.omega_c > 0.0, "omega_c: must be > 0");
  req(c.eval_users >= 1, "eval_users: must be >= 1");
  req(!c.settings.empty(), "setting: at least one setting must be selected");
  req(c.train_samples >= 1, "train_samples: must be >= 1");
  for (const auto cp : c.checkpoints)
    if (cp < 1) {
      errors.push_back("checkpoints: entries must be >= 1");
      break;
    }
  if (c.env != EnvKind::kSynthetic)
    req(!c.data_path.empty(), "data: a dataset path is required for env " +
                                  to_string(c.env));
  if (c.env == EnvKind::kAdData)
    req(c.addata_numeric_columns >= c.d,
        "addata_numeric_columns: must be >= d (numeric features used)");
  return errors;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "env") base.env = parse_env(value);
    else if (key == "d") base.d = std::stoi(value);
    else if (key == "q") base.q = std::stoi(value);
    else if (key == "k") base.k = std::stoi(value);
    else if (key == "actions") base.actions = std::stoi(value);
    else if (key == "users") base.users = std::stoll(value);
    else if (key == "samples") base.samples = std::stoi(value);
    else if (key == "alpha") base.alpha = std::stod(value);
    else if (key == "cb_sampling_rate") base.cb_sampling_rate = std::stod(value);
    else if (key == "neg_rew_sam_rate") base.neg_rew_sam_rate = std::stod(value);
    else if (key == "cb_context_threshold") base.cb_context_threshold = std::stoi(value);
    else if (key == "beta") base.beta = std::stod(value);
    else if (key == "sigma2") base.sigma2 = std::stod(value);
    else if (key == "batch") base.batch = std::stoi(value);
    else if (key == "omega_c") base.omega_c = std::stod(value);
    else if (key == "seed") base.seed = std::stoull(value);
    else if (key == "checkpoints") base.checkpoints = parse_checkpoints(value);
    else if (key == "setting") base.settings = parse_settings(value);
    else if (key == "data") base.data_path = value;
    else if (key == "encoder") base.encoder_path = value;
    else if (key == "out") base.out_path = value;
    else if (key == "batch_log") base.batch_log_path = value;
    else if (key == "eval_users") base.eval_users = std::stoi(value);
    else if (key == "private_context") base.private_context = parse_private_context(value);
    else if (key == "enum_cap") base.enumeration_cap = std::stoull(value);
    else if (key == "train_samples") base.train_samples = std::stoull(value);
    else if (key == "addata_numeric_columns") base.addata_numeric_columns = std::stoi(value);
    else
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path,
                                  ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config_file: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text, std::move(base));
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "env=" << to_string(c.env) << "\n";
  out << "d=" << c.d << "\n";
  out << "q=" << c.q << "\n";
  out << "k=" << c.k << "\n";
  out << "actions=" << c.actions << "\n";
  out << "users=" << c.users << "\n";
  out << "samples=" << c.samples << "\n";
  out << "alpha=" << format_double(c.alpha) << "\n";
  out << "cb_sampling_rate=" << format_double(c.cb_sampling_rate) << "\n";
  out << "neg_rew_sam_rate=" << format_double(c.neg_rew_sam_rate) << "\n";
  out << "cb_context_threshold=" << c.cb_context_threshold << "\n";
  out << "beta=" << format_double(c.beta) << "\n";
  out << "sigma2=" << format_double(c.sigma2) << "\n";
  out << "batch=" << c.batch << "\n";
  out << "omega_c=" << format_double(c.omega_c) << "\n";
  out << "seed=" << c.seed << "\n";
  if (!c.checkpoints.empty()) {
    out << "checkpoints=";
    for (size_t i = 0; i < c.checkpoints.size(); ++i)
      out << (i ? "," : "") << c.checkpoints[i];
    out << "\n";
  }
  out << "setting=" << settings_key(c.settings) << "\n";
  if (!c.data_path.empty()) out << "data=" << c.data_path << "\n";
  if (!c.encoder_path.empty()) out << "encoder=" << c.encoder_path << "\n";
  out << "out=" << c.out_path << "\n";
  if (!c.batch_log_path.empty()) out << "batch_log=" << c.batch_log_path << "\n";
  out << "eval_users=" << c.eval_users << "\n";
  out << "private_context=" << to_string(c.private_context) << "\n";
  out << "enum_cap=" << c.enumeration_cap << "\n";
  out << "train_samples=" << c.train_samples << "\n";
  if (c.env == EnvKind::kAdData)
    out << "addata_numeric_columns=" << c.addata_numeric_columns << "\n";
  return out.str();
}

}  // namespace p2b
