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

#include "provtree/ingest.h"

#include <fstream>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "provtree/random.h"
#include "test_support.h"

namespace provtree {
namespace {

using ::testing::Return;

class MockProvider : public VersionProvider {
 public:
  MOCK_METHOD(std::string, name, (), (const, override));
  MOCK_METHOD(std::vector<ImageServiceRecord>, lookup, (const VersionQuery&), (const, override));
};

ImageServiceRecord at(const std::string& id, int hours) {
  ImageServiceRecord r = testing::seed_record();
  r.id = id;
  r.upload_time = testing::seed_record().upload_time + std::chrono::hours(hours);
  return r;
}

TEST(DiscoverVersions, ReturnsProviderAnswer) {
  MockProvider p;
  EXPECT_CALL(p, name()).WillRepeatedly(Return("mock"));
  EXPECT_CALL(p, lookup).WillOnce(Return(std::vector{at("a", 0), at("b", 1)}));
  auto vs = discover_versions({"img", {}}, p);
  EXPECT_EQ(vs.source, "mock");
  EXPECT_EQ(vs.records.size(), 2u);
}

TEST(DiscoverVersions, EmptyAnswerIsAnError) {
  MockProvider p;
  EXPECT_CALL(p, name()).WillRepeatedly(Return("mock"));
  EXPECT_CALL(p, lookup).WillOnce(Return(std::vector<ImageServiceRecord>{}));
  EXPECT_THROW(discover_versions({"img", {}}, p), DiscoveryError);
}

TEST(DiscoverVersions, DuplicateIdsAreRejected) {
  MockProvider p;
  EXPECT_CALL(p, name()).WillRepeatedly(Return("mock"));
  EXPECT_CALL(p, lookup).WillOnce(Return(std::vector{at("a", 0), at("a", 1)}));
  EXPECT_THROW(discover_versions({"img", {}}, p), ValidationError);
}

TEST(LocalCorpusProvider, MissingFileIsDiscoveryError) {
  LocalCorpusProvider p;
  EXPECT_THROW(p.lookup({"img", "/nonexistent/corpus.json"}), DiscoveryError);
}

TEST(LocalCorpusProvider, ReadsCorpusFile) {
  const auto path = std::filesystem::temp_directory_path() / "provtree_ingest_test.json";
  {
    Corpus c;
    c.versions = {at("b", 2), at("a", 1)};
    std::ofstream(path) << serialize_corpus(c);
  }
  LocalCorpusProvider p;
  auto vs = discover_versions({"img", path}, p);
  EXPECT_EQ(vs.source, "local-corpus");
  ASSERT_EQ(vs.records.size(), 2u);
  EXPECT_EQ(sort_by_upload(vs)[0].id, "a");
  std::filesystem::remove(path);
}

TEST(SortByUpload, TiesBrokenById) {
  auto sorted = sort_by_upload(std::vector{at("c", 1), at("b", 1), at("a", 2), at("d", 0)});
  std::vector<std::string> ids;
  for (const auto& r : sorted) ids.push_back(r.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"d", "b", "c", "a"}));
}

TEST(SortByUpload, SortedAndIdempotentOnRandomInput) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ImageServiceRecord> rs;
    const int n = static_cast<int>(rng.range(1, 12));
    for (int i = 0; i < n; ++i) rs.push_back(at("id" + std::to_string(i), static_cast<int>(rng.below(5))));
    rng.shuffle(rs);
    auto once = sort_by_upload(rs);
    ASSERT_EQ(once.size(), rs.size());
    for (std::size_t i = 1; i < once.size(); ++i) {
      ASSERT_TRUE(once[i - 1].upload_time < once[i].upload_time ||
                  (once[i - 1].upload_time == once[i].upload_time && once[i - 1].id < once[i].id));
    }
    ASSERT_EQ(sort_by_upload(once), once);
  }
}

}  // namespace
}  // namespace provtree
