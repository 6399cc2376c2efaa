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

#include "p2b/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace p2b {
namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

char detect_delimiter(const std::string& line) {
  return line.find('\t') != std::string::npos ? '\t' : ',';
}

double parse_number(const std::string& s) {
  if (s.empty()) return 0.0;
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  return v;
}

}  // namespace

MultiLabelDataset load_multilabel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_multilabel: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_multilabel: empty file " + path);

  MultiLabelDataset ds;
  // Manifest: "# d=<d> actions=<A>".
  {
    std::istringstream m(line);
    std::string tok;
    while (m >> tok) {
      if (tok.rfind("d=", 0) == 0) ds.d = std::stoi(tok.substr(2));
      if (tok.rfind("actions=", 0) == 0) ds.actions = std::stoi(tok.substr(8));
    }
    if (line.empty() || line[0] != '#' || ds.d < 1 || ds.actions < 1)
      throw std::runtime_error(
          "load_multilabel: first line must be a manifest like "
          "'# d=4 actions=3'");
  }

  if (!std::getline(in, line))
    throw std::runtime_error("load_multilabel: missing header row");
  const char delim = detect_delimiter(line);

  size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_line(line, delim);
    if (static_cast<int>(fields.size()) != ds.d + ds.actions)
      throw std::runtime_error("load_multilabel: line " + std::to_string(line_no) +
                               " has " + std::to_string(fields.size()) +
                               " columns, expected " +
                               std::to_string(ds.d + ds.actions));
    MultiLabelInstance inst;
    inst.features.resize(ds.d);
    for (int i = 0; i < ds.d; ++i) {
      inst.features[i] = parse_number(fields[static_cast<size_t>(i)]);
      if (!std::isfinite(inst.features[i]))
        throw std::runtime_error("load_multilabel: non-finite feature at line " +
                                 std::to_string(line_no));
    }
    for (int a = 0; a < ds.actions; ++a)
      if (parse_number(fields[static_cast<size_t>(ds.d + a)]) != 0.0)
        inst.labels.push_back(a);
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

std::uint64_t feature_hash(const std::vector<std::string>& fields) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (const auto& f : fields) {
    for (unsigned char c : f) mix(c);
    mix(0x1f);  // unit separator, keeps field boundaries unambiguous
  }
  return h;
}

HashedCategoricals hash_categoricals(
    const std::vector<std::vector<std::string>>& records, int top_n,
    std::uint64_t buckets) {
  if (top_n < 1) throw std::domain_error("hash_categoricals: top_n must be >= 1");
  if (buckets < 1) throw std::domain_error("hash_categoricals: buckets must be >= 1");

  HashedCategoricals out;
  out.labels.assign(records.size(), 0);
  out.kept.assign(records.size(), false);
  if (records.empty()) return out;

  std::vector<std::uint64_t> codes(records.size());
  std::unordered_map<std::uint64_t, std::uint64_t> freq;
  for (size_t i = 0; i < records.size(); ++i) {
    codes[i] = feature_hash(records[i]) % buckets;
    freq[codes[i]]++;
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranked(freq.begin(),
                                                              freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::unordered_map<std::uint64_t, int> label_of;
  const int kept_n = std::min<int>(top_n, static_cast<int>(ranked.size()));
  for (int r = 0; r < kept_n; ++r) label_of[ranked[static_cast<size_t>(r)].first] = r + 1;

  for (size_t i = 0; i < records.size(); ++i) {
    const auto it = label_of.find(codes[i]);
    if (it != label_of.end()) {
      out.labels[i] = it->second;
      out.kept[i] = true;
    }
  }
  return out;
}

MultiLabelDataset load_addata(const std::string& path, int numeric_columns,
                              int d_numeric, int top_n, std::uint64_t buckets) {
  if (d_numeric < 1 || d_numeric > numeric_columns)
    throw std::domain_error("load_addata: d_numeric must lie in [1, numeric_columns]");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_addata: cannot open " + path);

  std::string line;
  std::vector<Eigen::VectorXd> features;
  std::vector<std::vector<std::string>> categoricals;
  char delim = '\t';
  bool first = true;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      delim = detect_delimiter(line);
      first = false;
    }
    const auto fields = split_line(line, delim);
    if (static_cast<int>(fields.size()) < 1 + numeric_columns)
      throw std::runtime_error("load_addata: line " + std::to_string(line_no) +
                               " has too few columns");
    Eigen::VectorXd x(d_numeric);
    for (int i = 0; i < d_numeric; ++i) x[i] = parse_number(fields[static_cast<size_t>(1 + i)]);
    features.push_back(std::move(x));
    categoricals.emplace_back(fields.begin() + 1 + numeric_columns, fields.end());
  }

  const auto hashed = hash_categoricals(categoricals, top_n, buckets);

  MultiLabelDataset ds;
  ds.d = d_numeric;
  ds.actions = top_n;
  for (size_t i = 0; i < features.size(); ++i) {
    if (!hashed.kept[i]) continue;
    MultiLabelInstance inst;
    inst.features = std::move(features[i]);
    inst.labels.push_back(hashed.labels[i] - 1);
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

void min_max_scale(std::vector<MultiLabelInstance>& instances) {
  if (instances.empty()) return;
  const Eigen::Index d = instances.front().features.size();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::max());
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::lowest());
  for (const auto& inst : instances) {
    lo = lo.cwiseMin(inst.features);
    hi = hi.cwiseMax(inst.features);
  }
  const Eigen::VectorXd range = (hi - lo).cwiseMax(0.0);
  for (auto& inst : instances)
    for (Eigen::Index i = 0; i < d; ++i)
      inst.features[i] = range[i] > 0.0 ? (inst.features[i] - lo[i]) / range[i] : 0.0;
}

}  // namespace p2b
