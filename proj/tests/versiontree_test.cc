// Copyright 2026 The provtree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "provtree/versiontree.h"

#include <cmath>
#include <functional>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "provtree/evalgen.h"
#include "provtree/geo.h"
#include "provtree/random.h"
#include "test_support.h"

namespace provtree {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::IsEmpty;
using ::testing::Not;

constexpr Strategy kStrategies[] = {Strategy::kBaseline, Strategy::kHeuristic,
                                    Strategy::kBruteforce};

// Minimum total weight over every parent function that forms a tree,
// enumerated directly (n^n assignments, cycle-checked).
double min_tree_weight_oracle(PairFitter& fitter) {
  const int n = static_cast<int>(fitter.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> parent(n, -1);
  auto is_tree = [&](int root) {
    for (int v = 0; v < n; ++v) {
      int cur = v;
      for (int steps = 0; cur != root; ++steps) {
        if (steps > n) return false;
        cur = parent[cur];
      }
    }
    return true;
  };
  for (int root = 0; root < n; ++root) {
    std::function<void(int, double)> assign = [&](int v, double w) {
      if (w >= best) return;
      if (v == n) {
        if (is_tree(root)) best = w;
        return;
      }
      if (v == root) {
        parent[v] = -1;
        assign(v + 1, w);
        return;
      }
      for (int p = 0; p < n; ++p) {
        if (p == v) continue;
        parent[v] = p;
        assign(v + 1, w + fitter.weight(p, v));
      }
    };
    assign(0, 0.0);
  }
  return best;
}

std::vector<std::string> ids(const std::vector<ImageServiceRecord>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs) out.push_back(v.id);
  return out;
}

TEST(CheckTree, AcceptsAValidTree) {
  VersionTree t;
  t.nodes = {"a", "b", "c"};
  t.root = "a";
  t.parent = {{"b", "a"}, {"c", "b"}};
  EXPECT_THAT(check_tree(t), IsEmpty());
  EXPECT_THAT(t.children("a"), ElementsAre("b"));
}

TEST(CheckTree, FindsStructuralProblems) {
  VersionTree cycle;
  cycle.nodes = {"a", "b", "c"};
  cycle.root = "a";
  cycle.parent = {{"b", "c"}, {"c", "b"}};
  EXPECT_THAT(check_tree(cycle), ElementsAre(HasSubstr("does not reach the root"),
                                             HasSubstr("does not reach the root")));
  VersionTree bad_root = cycle;
  bad_root.root = "z";
  EXPECT_THAT(check_tree(bad_root), Not(IsEmpty()));
  VersionTree missing;
  missing.nodes = {"a", "b"};
  missing.root = "a";
  EXPECT_THAT(check_tree(missing), ElementsAre(HasSubstr("expected 1 parent links")));
  VersionTree self;
  self.nodes = {"a", "b"};
  self.root = "a";
  self.parent = {{"b", "b"}};
  EXPECT_THAT(check_tree(self), ElementsAre(HasSubstr("self loop")));
}

TEST(TreeFromParentMap, RequiresOneRoot) {
  EXPECT_THROW(tree_from_parent_map({"a", "b"}, {{"a", std::nullopt}, {"b", std::nullopt}}),
               std::invalid_argument);
  EXPECT_THROW(tree_from_parent_map({"a", "b"}, {{"a", "b"}, {"b", "a"}}), std::invalid_argument);
  auto t = tree_from_parent_map({"a", "b"}, {{"a", std::nullopt}, {"b", "a"}});
  EXPECT_EQ(t.root, "a");
}

TEST(TreeAccuracy, HandCounted) {
  auto truth = tree_from_parent_map({"a", "b", "c", "d"},
                                    {{"a", std::nullopt}, {"b", "a"}, {"c", "b"}, {"d", "b"}});
  auto guess = tree_from_parent_map({"a", "b", "c", "d"},
                                    {{"a", std::nullopt}, {"b", "a"}, {"c", "a"}, {"d", "c"}});
  EXPECT_DOUBLE_EQ(tree_accuracy(guess, truth), 0.5);
  EXPECT_DOUBLE_EQ(tree_accuracy(truth, truth), 1.0);
  auto flipped = tree_from_parent_map({"a", "b", "c", "d"},
                                      {{"b", std::nullopt}, {"a", "b"}, {"c", "b"}, {"d", "b"}});
  EXPECT_DOUBLE_EQ(tree_accuracy(flipped, truth), 0.5);
  auto other = tree_from_parent_map({"a", "x"}, {{"a", std::nullopt}, {"x", "a"}});
  EXPECT_THROW(tree_accuracy(other, truth), std::invalid_argument);
}

TEST(HeuristicParams, Validation) {
  EXPECT_NO_THROW(validate(HeuristicParams{}));
  HeuristicParams p;
  p.growth = 1.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = {};
  p.epsilon = 0.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = {};
  p.candidate_k = 0;
  EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(Strategy, Names) {
  for (Strategy s : kStrategies) EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_FALSE(parse_strategy("greedy").has_value());
}

TEST(Builders, IdenticalCorpusGivesTheUploadChain) {
  for (std::size_t n : {1u, 2u, 5u, 7u}) {
    const auto versions = testing::identical_corpus(n);
    for (Strategy s : kStrategies) {
      const VersionTree t = build_tree(s, versions, default_group_schemas());
      EXPECT_EQ(t.root, "v1") << to_string(s);
      for (std::size_t i = 1; i < n; ++i) {
        EXPECT_EQ(t.parent.at(versions[i].id), versions[i - 1].id) << to_string(s) << " n=" << n;
      }
      EXPECT_EQ(t.total_weight(), 0.0);
    }
  }
}

TEST(Builders, EmptyInputRejected) {
  for (Strategy s : kStrategies) {
    EXPECT_THROW(build_tree(s, {}, default_group_schemas()), std::invalid_argument);
  }
}

TEST(Builders, BruteforceSizeGuard) {
  TreeOptions o;
  o.n_max = 4;
  EXPECT_THROW(build_tree_bruteforce(testing::identical_corpus(5), default_group_schemas(), o),
               SizeGuardError);
}

TEST(Builders, BaselineIsTheUploadChain) {
  const auto corpus = testing::fuzzed_corpus(9, 6);
  BuildStats stats;
  const auto t = build_baseline_chain(corpus.versions, default_group_schemas(), {}, &stats);
  EXPECT_EQ(t.root, corpus.versions.front().id);
  std::size_t shared_groups = 0;
  for (std::size_t i = 1; i < corpus.versions.size(); ++i) {
    const auto& id = corpus.versions[i].id;
    EXPECT_EQ(t.parent.at(id), corpus.versions[i - 1].id);
    for (const auto& [gid, kind] : t.edges.at(id).kind_per_group) {
      if (kind != GroupFitKind::kMissing) ++shared_groups;
    }
  }
  // One choose_transform per shared group on each of the N-1 edges.
  EXPECT_EQ(stats.fit_count, shared_groups);
}

TEST(Builders, BruteforceMatchesEnumerationOracle) {
  const auto schemas = default_group_schemas();
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const auto corpus = testing::fuzzed_corpus(1000 + seed, n);
    const auto clusters = build_clusters(corpus.versions, schemas);
    PairFitter fitter(clusters, {});
    const double oracle = min_tree_weight_oracle(fitter);
    const auto t = build_tree_bruteforce(corpus.versions, schemas);
    ASSERT_THAT(check_tree(t), IsEmpty());
    ASSERT_NEAR(t.total_weight(), oracle, 1e-9) << "seed " << seed;
  }
}

TEST(Builders, BruteforceNeverHeavierProperty) {
  const auto schemas = default_group_schemas();
  for (uint64_t seed = 0; seed < 60; ++seed) {
    const auto corpus = testing::fuzzed_corpus(2000 + seed, 3 + seed % 5);
    const auto b = build_tree_bruteforce(corpus.versions, schemas);
    const auto h = build_tree_heuristic(corpus.versions, schemas);
    const auto c = build_baseline_chain(corpus.versions, schemas);
    ASSERT_LE(b.total_weight(), h.total_weight() + 1e-9);
    ASSERT_LE(b.total_weight(), c.total_weight() + 1e-9);
    const auto truth_w = [&] {
      const auto clusters = build_clusters(corpus.versions, schemas);
      PairFitter f(clusters, {});
      std::map<std::string, std::size_t> idx;
      for (std::size_t i = 0; i < corpus.versions.size(); ++i) idx[corpus.versions[i].id] = i;
      double w = 0.0;
      for (const auto& [child, parent] : corpus.truth.parent) w += f.weight(idx[parent], idx[child]);
      return w;
    }();
    ASSERT_LE(b.total_weight(), truth_w + 1e-9);
  }
}

TEST(Builders, HeuristicKeepsFirstUploadAsRoot) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const auto corpus = testing::fuzzed_corpus(3000 + seed, 6);
    BuildStats stats;
    const auto t = build_tree_heuristic(corpus.versions, default_group_schemas(), {}, &stats);
    EXPECT_EQ(t.root, corpus.versions.front().id);
    EXPECT_EQ(stats.order.front(), 0u);
  }
}

TEST(Builders, ZeroAcceptanceForcesCheapestAttachment) {
  const auto corpus = testing::fuzzed_corpus(77, 5);
  const auto schemas = default_group_schemas();
  TreeOptions o;
  o.heuristic.accept_complexity = 0.0;
  o.heuristic.threshold0 = 1e9;  // no reordering
  const auto t = build_tree_heuristic(corpus.versions, schemas, o);
  const auto clusters = build_clusters(corpus.versions, schemas);
  PairFitter f(clusters, {});
  for (std::size_t x = 1; x < corpus.versions.size(); ++x) {
    const auto& e = t.edges.at(corpus.versions[x].id);
    if (!e.forced) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < x; ++j) best = std::min(best, f.weight(j, x));
    EXPECT_NEAR(e.total_complexity, best, 1e-9);
  }
}

TEST(ReorderSequence, PermutationWithFixedHeadProperty) {
  const auto schemas = default_group_schemas();
  Rng rng(5);
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const auto corpus = testing::fuzzed_corpus(4000 + seed, 2 + seed % 7);
    const auto clusters = build_clusters(corpus.versions, schemas);
    HeuristicParams p;
    p.epsilon = rng.uniform(0.01, 1.0);
    p.threshold0 = rng.uniform(0.0, 0.3);
    PairFitter fitter(clusters, {});
    BuildStats stats;
    auto seq = reorder_sequence(clusters, p, fitter, &stats);
    ASSERT_EQ(seq.front(), 0u);
    std::sort(seq.begin(), seq.end());
    for (std::size_t i = 0; i < seq.size(); ++i) ASSERT_EQ(seq[i], i);
    ASSERT_EQ(stats.thresholds.size(), stats.swaps);
    for (std::size_t k = 1; k < stats.thresholds.size(); ++k) {
      ASSERT_GE(stats.thresholds[k], stats.thresholds[k - 1]);
    }
  }
}

TEST(ReorderSequence, HighThresholdKeepsUploadOrder) {
  const auto corpus = testing::fuzzed_corpus(5, 7);
  const auto clusters = build_clusters(corpus.versions, default_group_schemas());
  HeuristicParams p;
  p.threshold0 = 2.0;  // overlap gains never exceed 1
  EXPECT_THAT(reorder_sequence(clusters, p), ElementsAre(0, 1, 2, 3, 4, 5, 6));
}

TEST(ReorderSequence, ZeroPassesIsIdentity) {
  const auto corpus = testing::fuzzed_corpus(6, 5);
  const auto clusters = build_clusters(corpus.versions, default_group_schemas());
  HeuristicParams p;
  p.max_passes = 0;
  EXPECT_THAT(reorder_sequence(clusters, p), ElementsAre(0, 1, 2, 3, 4));
}

TEST(SemanticDiff, HandComputedDeltas) {
  ImageServiceRecord a = testing::seed_record();
  ImageServiceRecord b = a;
  b.spatial->latitude = 51.5074;
  b.spatial->longitude = -0.1278;
  b.spatial->city = "London";
  b.spatial->country = "United Kingdom";
  *b.temporal->datetime_original += std::chrono::hours(2);
  b.contextual = ContextualAttrs{"Bridge at night", std::nullopt, std::nullopt};
  const SemanticDiff d = semantic_diff(a, b);
  // New York to London, about 5570 km on a 6371 km sphere.
  EXPECT_NEAR(d.delta_spatial_km, 5570.0, 5.0);
  EXPECT_THAT(d.changed_labels, ElementsAre("city", "country"));
  EXPECT_EQ(d.delta_temporal_s, 7200.0);
  EXPECT_GT(d.delta_context, 0.5);
  EXPECT_LE(d.delta_context, 1.0);
  EXPECT_EQ(semantic_diff(a, a), SemanticDiff{});
}

TEST(SemanticDiff, HaversineQuarterMeridian) {
  EXPECT_NEAR(haversine_km(0, 0, 90, 0), kEarthRadiusKm * std::numbers::pi / 2, 1e-9);
  EXPECT_NEAR(haversine_km(10, 20, 10, 20), 0.0, 1e-12);
}

TEST(Formats, DotMarksRootAndForcedEdges) {
  const auto versions = testing::identical_corpus(3);
  VersionTree t = build_baseline_chain(versions, default_group_schemas());
  t.edges["v3"].forced = true;
  const std::string dot = tree_to_dot(t, versions);
  EXPECT_THAT(dot, HasSubstr("digraph version_tree {"));
  EXPECT_THAT(dot, HasSubstr("\"v1\" [label=\"v1\\n2020-06-16T12:00:00Z\", peripheries=2];"));
  EXPECT_THAT(dot, HasSubstr("\"v2\" -> \"v3\" [label=\"c=0.0000\\nds=0.0km dt=0s dc=0.000\", "
                             "style=dashed];"));
}

TEST(Formats, JsonCarriesEdges) {
  const auto versions = testing::identical_corpus(2);
  const Json doc = tree_to_json(build_baseline_chain(versions, default_group_schemas()));
  EXPECT_EQ(doc["root"], "v1");
  EXPECT_EQ(doc["parent"]["v2"], "v1");
  EXPECT_EQ(doc["edges"]["v2"]["forced"], false);
  EXPECT_EQ(doc["edges"]["v2"]["groups"]["G1_timestamps"], "linear");
}

}  // namespace
}  // namespace provtree
