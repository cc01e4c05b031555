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

// Version discovery. A provider answers "which records are versions of this
// image"; membership is entirely the provider's assertion.

#ifndef PROVTREE_INGEST_H_
#define PROVTREE_INGEST_H_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "provtree/model.h"

namespace provtree {

class DiscoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VersionQuery {
  std::string image_id;
  std::filesystem::path corpus_path;
};

struct VersionSet {
  std::vector<ImageServiceRecord> records;
  std::string source;
};

class VersionProvider {
 public:
  virtual ~VersionProvider() = default;
  virtual std::string name() const = 0;
  // Throws DiscoveryError when the backing store cannot be read.
  virtual std::vector<ImageServiceRecord> lookup(const VersionQuery& query) const = 0;
};

// Answers every query with the full content of the corpus file at
// query.corpus_path. The image id is not used to filter: a corpus file is one
// image's version set.
class LocalCorpusProvider : public VersionProvider {
 public:
  std::string name() const override { return "local-corpus"; }
  std::vector<ImageServiceRecord> lookup(const VersionQuery& query) const override;
};

// Throws DiscoveryError for provider failures and empty answers, and
// ValidationError when record ids collide.
VersionSet discover_versions(const VersionQuery& query, const VersionProvider& provider);

// Ascending upload time, ties broken by id. Stable and idempotent.
std::vector<ImageServiceRecord> sort_by_upload(const VersionSet& versions);
std::vector<ImageServiceRecord> sort_by_upload(std::vector<ImageServiceRecord> records);

}  // namespace provtree

#endif  // PROVTREE_INGEST_H_
