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

#include "provtree/embedding.h"

#include <algorithm>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "provtree/evalgen.h"
#include "provtree/random.h"
#include "test_support.h"

namespace provtree {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;

TEST(Normalize, HandComputed) {
  const std::vector<double> v = {2.0, 4.0, 3.0, 10.0};
  EXPECT_THAT(normalize(v), ElementsAre(0.0, 0.25, 0.125, 1.0));
}

TEST(Normalize, FlatAndEmpty) {
  const std::vector<double> flat = {7.0, 7.0, 7.0};
  EXPECT_THAT(normalize(flat), ElementsAre(0.5, 0.5, 0.5));
  EXPECT_THAT(normalize(std::vector<double>{}), IsEmpty());
  EXPECT_THAT(normalize(std::vector<double>{-3.0}), ElementsAre(0.5));
}

TEST(Normalize, RangeAndAffineInvarianceProperty) {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1e6, 1e6);
    if (rng.bernoulli(0.1)) std::fill(v.begin(), v.end(), v[0]);
    const auto out = normalize(v);
    ASSERT_EQ(out.size(), n);
    for (double x : out) ASSERT_TRUE(x >= 0.0 && x <= 1.0);
    const double scale = rng.uniform(0.1, 100.0);
    const double shift = rng.uniform(-50.0, 50.0);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = scale * v[i] + shift;
    const auto out2 = normalize(w);
    for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(out[i], out2[i], 1e-6);
  }
}

TEST(Tokenize, SplitsOnPunctuationAndLowercases) {
  EXPECT_THAT(tokenize("Plane, on the RIVER!"), ElementsAre("plane", "on", "the", "river"));
  EXPECT_THAT(tokenize("  "), IsEmpty());
  EXPECT_THAT(tokenize("new-york"), ElementsAre("new", "york"));
}

TEST(EmbedText, BucketMatchesPublishedFnvVectors) {
  // FNV-1a 64: "a" -> 0xaf63dc4c8601ec8c, "foobar" -> 0x85944171f73967e8.
  const Eigen::VectorXd a = embed_text("a", 64);
  EXPECT_EQ(a[0xaf63dc4c8601ec8cull % 64], 1.0);
  EXPECT_DOUBLE_EQ(a.norm(), 1.0);
  const Eigen::VectorXd f = embed_text("FOOBAR", 1000);
  EXPECT_EQ(f[0x85944171f73967e8ull % 1000], 1.0);
}

TEST(EmbedText, CountsAreL2Normalized) {
  const Eigen::VectorXd v = embed_text("a a a", 16);
  EXPECT_EQ(v[0xaf63dc4c8601ec8cull % 16], 1.0);
  EXPECT_EQ(embed_text("", 16).norm(), 0.0);
  EXPECT_THROW(embed_text("x", 0), std::invalid_argument);
}

TEST(Cosine, Basics) {
  const Eigen::VectorXd a = embed_text("plane on the river", 64);
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-12);
  EXPECT_EQ(cosine_similarity(a, Eigen::VectorXd::Zero(64)), 0.0);
  Eigen::VectorXd x(2), y(2);
  x << 1, 0;
  y << 1, 1;
  EXPECT_NEAR(cosine_similarity(x, y), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Schemas, ShippedFileMatchesDefaults) {
  const auto shipped = load_group_schemas(testing::data_path("group_schemas.json"));
  EXPECT_EQ(group_schemas_to_json(shipped), group_schemas_to_json(default_group_schemas()));
  EXPECT_EQ(shipped.size(), 10u);
}

TEST(Schemas, RejectUnknownFieldsAndKinds) {
  EXPECT_THROW(group_schemas_from_json(Json::parse(
                   R"({"groups": [{"group_id": "g", "dims": [{"field": "camera.flux"}]}]})")),
               std::invalid_argument);
  EXPECT_THROW(group_schemas_from_json(Json::parse(
                   R"({"groups": [{"group_id": "g", "dims": [{"field": "camera.iso", "kind": "x"}]}]})")),
               std::invalid_argument);
  EXPECT_THROW(group_schemas_from_json(Json::parse(R"({"groups": [{"group_id": "g", "dims": []}]})")),
               std::invalid_argument);
  // A text field read as numeric is also unknown.
  EXPECT_THROW(group_schemas_from_json(Json::parse(
                   R"({"groups": [{"group_id": "g", "dims": [{"field": "camera.make"}]}]})")),
               std::invalid_argument);
}

TEST(Schemas, DimensionCountsTextWidth) {
  GroupSchema s{"g", {{"camera.iso", DimKind::kNumeric, 0}, {"camera.make", DimKind::kText, 8},
                      {"contextual.title", DimKind::kText, 0}}};
  EXPECT_EQ(s.dimension(64), 1 + 8 + 64);
}

TEST(Fields, NumericAndTextAccessors) {
  const auto& r = testing::seed_record();
  EXPECT_EQ(numeric_field(r, "camera.iso"), 100.0);
  EXPECT_EQ(numeric_field(r, "camera.resolution.width"), 6720.0);
  EXPECT_EQ(numeric_field(r, "camera.white_balance"),
            static_cast<double>(WhiteBalance::kDaylight));
  EXPECT_EQ(numeric_field(r, "temporal.datetime_original"),
            static_cast<double>(r.temporal->datetime_original->time_since_epoch().count()));
  EXPECT_EQ(text_field(r, "spatial.city"), "New York");
  EXPECT_FALSE(numeric_field(r, "camera.make").has_value());
  EXPECT_TRUE(is_known_field("spatial.latitude", DimKind::kAngularDegrees));
  EXPECT_FALSE(is_known_field("spatial.city", DimKind::kNumeric));
}

TEST(BuildClusters, IdenticalVersionsSitAtTheCenter) {
  const auto versions = testing::identical_corpus(4);
  const auto clusters = build_clusters(versions, default_group_schemas());
  ASSERT_EQ(clusters.size(), 4u);
  EXPECT_EQ(clusters.front().t_upload, 0.0);
  EXPECT_EQ(clusters.back().t_upload, 1.0);
  for (const auto& c : clusters) {
    EXPECT_EQ(c.points.size(), 10u);
    for (const auto& [gid, p] : c.points) {
      EXPECT_TRUE((p.values.array() == 0.5).all()) << gid;
    }
  }
  EXPECT_EQ(intersection_score(clusters[0], clusters[3], 0.1), 1.0);
}

TEST(BuildClusters, ShapesAndRangeOnFuzzedCorpora) {
  const auto schemas = default_group_schemas();
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const auto corpus = testing::fuzzed_corpus(seed, 3 + seed % 6);
    const auto clusters = build_clusters(corpus.versions, schemas, {16});
    ASSERT_EQ(clusters.size(), corpus.versions.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      ASSERT_EQ(clusters[i].version_id, corpus.versions[i].id);
      ASSERT_TRUE(clusters[i].t_upload >= 0.0 && clusters[i].t_upload <= 1.0);
      for (const auto& s : schemas) {
        auto it = clusters[i].points.find(s.group_id);
        if (it == clusters[i].points.end()) continue;
        ASSERT_EQ(it->second.values.size(), s.dimension(16));
        ASSERT_TRUE((it->second.values.array() >= 0.0).all());
        ASSERT_TRUE((it->second.values.array() <= 1.0).all());
      }
    }
  }
}

TEST(BuildClusters, MissingGroupIsAbsent) {
  auto versions = testing::identical_corpus(2);
  versions[1].environment.reset();
  const auto clusters = build_clusters(versions, default_group_schemas());
  EXPECT_TRUE(clusters[0].points.contains("G8_environment"));
  EXPECT_FALSE(clusters[1].points.contains("G8_environment"));
  // Water depth shares the GPS fields, so the group survives.
  EXPECT_TRUE(clusters[1].points.contains("G9_water_depth"));
}

TEST(BuildClusters, ChangedNumericFieldSpansTheUnitInterval) {
  auto versions = testing::identical_corpus(3);
  versions[1].camera->iso = 200;
  versions[2].camera->iso = 400;
  const GroupSchema iso{"iso", {{"camera.iso", DimKind::kNumeric, 0}}};
  const auto clusters = build_clusters(versions, {iso});
  EXPECT_EQ(clusters[0].points.at("iso").values[0], 0.0);
  EXPECT_NEAR(clusters[1].points.at("iso").values[0], 1.0 / 3.0, 1e-12);
  EXPECT_EQ(clusters[2].points.at("iso").values[0], 1.0);
}

TEST(IntersectionScore, CountsCloseSharedGroups) {
  Cluster a, b;
  auto point = [](double x) {
    AttributeVector v;
    v.values = Eigen::VectorXd::Constant(2, x);
    return v;
  };
  a.points = {{"g1", point(0.0)}, {"g2", point(0.0)}, {"only_a", point(0.0)}};
  b.points = {{"g1", point(0.05)}, {"g2", point(0.9)}, {"only_b", point(0.0)}};
  // |0.05 * (1, 1)| = 0.0707 <= 0.1
  EXPECT_DOUBLE_EQ(intersection_score(a, b, 0.1), 0.5);
  EXPECT_DOUBLE_EQ(intersection_score(a, b, 2.0), 1.0);
  EXPECT_EQ(intersection_score(a, Cluster{}, 0.1), 0.0);
  EXPECT_THROW(intersection_score(a, b, 0.0), std::invalid_argument);
}

TEST(ClustersJson, ListsEveryVersion) {
  const auto clusters = build_clusters(testing::identical_corpus(2), default_group_schemas());
  const Json doc = clusters_to_json(clusters);
  ASSERT_TRUE(doc.is_array());
  ASSERT_EQ(doc.size(), 2u);
}

}  // namespace
}  // namespace provtree
