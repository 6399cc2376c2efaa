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

#include "p2b/pipeline.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

using namespace p2b;

namespace {

std::multiset<std::tuple<int, int, int>> multiset_of(
    const std::vector<InteractionTuple>& tuples) {
  std::multiset<std::tuple<int, int, int>> out;
  for (const auto& t : tuples) out.insert({t.code, t.action, t.reward});
  return out;
}

}  // namespace

// The anonymized tuple type carries nothing but the payload triple; there is
// no field an agent identifier could hide in.
static_assert(sizeof(InteractionTuple) == 3 * sizeof(int));
static_assert(std::is_aggregate_v<InteractionTuple>);

TEST_CASE("maybe_report extremes and empirical rate") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK(maybe_report(rng, 1.0, 1.0, 1));
    CHECK_FALSE(maybe_report(rng, 0.0, 0.0, i % 2));
  }

  Rng rate_rng(2);
  int accepted = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i)
    if (maybe_report(rate_rng, 0.5, 0.05, 1)) ++accepted;
  CHECK(std::abs(accepted / static_cast<double>(trials) - 0.5) < 0.01);

  Rng neg_rng(3);
  accepted = 0;
  for (int i = 0; i < trials; ++i)
    if (maybe_report(neg_rng, 0.5, 0.05, 0)) ++accepted;
  CHECK(std::abs(accepted / static_cast<double>(trials) - 0.05) < 0.005);

  CHECK_THROWS_AS(maybe_report(rng, 1.5, 0.0, 1), std::domain_error);
}

TEST_CASE("anonymize strips metadata and preserves order") {
  CHECK(anonymize({}).empty());

  std::vector<ReportPayload> batch{{3, 1, 1, "agent-7"}, {5, 0, 0, "agent-9"}};
  const auto tuples = anonymize(batch);
  REQUIRE(tuples.size() == 2);
  CHECK(tuples[0].code == 3);
  CHECK(tuples[0].action == 1);
  CHECK(tuples[0].reward == 1);
  CHECK(tuples[1].code == 5);

  // Serialization audit: nothing written downstream mentions the tags.
  std::ostringstream log;
  write_batch_log(log, RefinedBatch{tuples, 1, 0}, 0);
  CHECK(log.str().find("agent") == std::string::npos);
  CHECK(log.str().find("7") == std::string::npos);
}

TEST_CASE("shuffle preserves the multiset") {
  Rng rng(5);
  std::vector<InteractionTuple> tuples;
  for (int i = 0; i < 500; ++i)
    tuples.push_back({i % 17, i % 3, i % 2});
  const auto before = multiset_of(tuples);
  shuffle_tuples(rng, tuples);
  CHECK(multiset_of(tuples) == before);

  std::vector<InteractionTuple> empty;
  shuffle_tuples(rng, empty);
  CHECK(empty.empty());

  std::vector<InteractionTuple> one{{1, 2, 1}};
  shuffle_tuples(rng, one);
  CHECK(one[0].code == 1);
}

TEST_CASE("shuffle is uniform: marked-element position chi-square") {
  Rng rng(2718);
  const int size = 16;
  const int trials = 10000;
  std::vector<int> position_counts(size, 0);
  for (int t = 0; t < trials; ++t) {
    std::vector<InteractionTuple> tuples(size);
    for (int i = 0; i < size; ++i) tuples[i] = {i, 0, 0};
    shuffle_tuples(rng, tuples);
    for (int i = 0; i < size; ++i)
      if (tuples[i].code == 0) position_counts[i]++;
  }
  const double expected = trials / static_cast<double>(size);
  double chi2 = 0;
  for (const int c : position_counts)
    chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 30.5779);  // chi-square 0.99 quantile, 15 dof
}

TEST_CASE("threshold keeps exactly the codes at or above l") {
  const std::vector<InteractionTuple> tuples{
      {3, 0, 1}, {3, 1, 0}, {3, 0, 0}, {7, 2, 1}};
  const auto refined = apply_threshold(tuples, 2);
  REQUIRE(refined.tuples.size() == 3);
  for (const auto& t : refined.tuples) CHECK(t.code == 3);
  CHECK(refined.dropped_count == 1);
  CHECK(refined.threshold_used == 2);

  const auto all = apply_threshold(tuples, 1);
  CHECK(all.tuples.size() == 4);
  CHECK(all.dropped_count == 0);

  const std::vector<InteractionTuple> mixed{
      {1, 0, 0}, {1, 0, 0}, {2, 0, 0}, {2, 0, 0}, {2, 0, 0}};
  const auto strict = apply_threshold(mixed, 3);
  REQUIRE(strict.tuples.size() == 3);
  for (const auto& t : strict.tuples) CHECK(t.code == 2);
}

TEST_CASE("threshold fuzz: survivors always reach l, drops are exact") {
  Rng rng(13);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = static_cast<int>(rng.uniform_below(120));
    const int l = 1 + static_cast<int>(rng.uniform_below(8));
    std::vector<InteractionTuple> tuples;
    for (int i = 0; i < n; ++i)
      tuples.push_back({static_cast<int>(rng.uniform_below(20)),
                        static_cast<int>(rng.uniform_below(4)),
                        rng.bernoulli(0.5) ? 1 : 0});

    const auto refined = apply_threshold(tuples, l);

    std::map<int, int> counts;
    for (const auto& t : tuples) counts[t.code]++;
    std::map<int, int> surviving;
    for (const auto& t : refined.tuples) {
      CHECK(counts[t.code] >= l);
      surviving[t.code]++;
    }
    // Survivors appear with their full original multiplicity.
    for (const auto& [code, cnt] : surviving) CHECK(cnt == counts[code]);
    std::uint64_t expected_drops = 0;
    for (const auto& [code, cnt] : counts)
      if (cnt < l) expected_drops += static_cast<std::uint64_t>(cnt);
    CHECK(refined.dropped_count == expected_drops);
    CHECK(refined.tuples.size() + refined.dropped_count == tuples.size());
  }
}

TEST_CASE("shuffler flushes on batch boundary only") {
  Shuffler shuffler(3, 1, 42);
  CHECK_FALSE(shuffler.submit({1, 0, 1, "a"}).has_value());
  CHECK_FALSE(shuffler.submit({2, 0, 1, "b"}).has_value());
  const auto batch = shuffler.submit({1, 1, 0, "c"});
  REQUIRE(batch.has_value());
  CHECK(batch->tuples.size() == 3);
  CHECK(shuffler.pending() == 0);

  CHECK_FALSE(shuffler.submit({4, 0, 1, "d"}).has_value());
  CHECK(shuffler.pending() == 1);
  const auto residual = shuffler.flush();
  REQUIRE(residual.has_value());
  CHECK(residual->tuples.size() == 1);
  CHECK_FALSE(shuffler.flush().has_value());
}

TEST_CASE("server ingest updates one-hot statistics and bumps the version") {
  GlobalCodeModel model{CodeLinUcbD(4, 3, 1.0), 0};

  server_ingest(model, RefinedBatch{{}, 1, 0});
  CHECK(model.version == 1);
  CHECK(model.bandit.design_diagonal(0).isOnes());

  server_ingest(model, RefinedBatch{{{2, 0, 1}}, 1, 0});
  CHECK(model.version == 2);
  CHECK(model.bandit.design_diagonal(0)[2] == 2.0);
  CHECK(model.bandit.response(0)[2] == 1.0);
  CHECK(model.bandit.design_diagonal(0)[0] == 1.0);
  CHECK(model.bandit.design_diagonal(1).isOnes());

  CHECK_THROWS_AS(server_ingest(model, RefinedBatch{{{9, 0, 1}}, 1, 0}),
                  std::out_of_range);
  CHECK(model.version == 2);
}

TEST_CASE("server ingest is order-independent") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<InteractionTuple> tuples;
    const int n = 1 + static_cast<int>(rng.uniform_below(150));
    for (int i = 0; i < n; ++i)
      tuples.push_back({static_cast<int>(rng.uniform_below(8)),
                        static_cast<int>(rng.uniform_below(3)),
                        rng.bernoulli(0.5) ? 1 : 0});
    std::vector<InteractionTuple> permuted = tuples;
    shuffle_tuples(rng, permuted);

    GlobalCodeModel a{CodeLinUcbD(8, 3, 1.0), 0};
    GlobalCodeModel b{CodeLinUcbD(8, 3, 1.0), 0};
    server_ingest(a, RefinedBatch{tuples, 1, 0});
    server_ingest(b, RefinedBatch{permuted, 1, 0});
    for (int act = 0; act < 3; ++act) {
      CHECK((a.bandit.design_diagonal(act) - b.bandit.design_diagonal(act))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK((a.bandit.response(act) - b.bandit.response(act))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("warm start is an isolated deep copy") {
  GlobalCodeModel model{CodeLinUcbD(4, 2, 1.0), 0};
  auto fresh = warm_start(model);
  CHECK(fresh.design_diagonal(0).isOnes());
  CHECK(fresh.response(0).isZero());

  auto agent = warm_start(model);
  agent.update(1, 0, 1);
  CHECK(model.bandit.design_diagonal(0)[1] == 1.0);
  CHECK(agent.design_diagonal(0)[1] == 2.0);

  auto twin1 = warm_start(model);
  auto twin2 = warm_start(model);
  CHECK(twin1.design_diagonal(0) == twin2.design_diagonal(0));
  CHECK(twin1.response(0) == twin2.response(0));
}

TEST_CASE("batch audit log format") {
  std::ostringstream out;
  write_batch_log(out, RefinedBatch{{{3, 1, 1}, {3, 0, 0}}, 2, 5}, 4);
  CHECK(out.str() == "# batch=4 threshold=2 dropped=5\n3,1,1\n3,0,0\n");
}

TEST_CASE("end-to-end multiset safety through the pipeline") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ReportPayload> submitted;
    Shuffler shuffler(25, 2, 1000 + trial);
    std::vector<InteractionTuple> delivered;
    for (int i = 0; i < 25; ++i) {
      ReportPayload p{static_cast<int>(rng.uniform_below(6)),
                      static_cast<int>(rng.uniform_below(3)),
                      rng.bernoulli(0.5) ? 1 : 0,
                      "agent-" + std::to_string(i)};
      submitted.push_back(p);
      if (auto batch = shuffler.submit(p))
        delivered.insert(delivered.end(), batch->tuples.begin(),
                         batch->tuples.end());
    }
    const auto source = multiset_of(anonymize(submitted));
    const auto sink = multiset_of(delivered);
    for (const auto& t : sink) CHECK(source.count(t) >= sink.count(t));
  }
}
