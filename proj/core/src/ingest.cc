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

#include <algorithm>
#include <set>

#include "provtree/sidecar.h"

namespace provtree {

std::vector<ImageServiceRecord> LocalCorpusProvider::lookup(const VersionQuery& query) const {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(query.corpus_path, ec)) {
    throw DiscoveryError("corpus file not found: '" + query.corpus_path.string() + "'");
  }
  std::string bytes;
  try {
    bytes = read_file(query.corpus_path);
  } catch (const std::runtime_error& e) {
    throw DiscoveryError(e.what());
  }
  return parse_corpus(bytes).versions;
}

VersionSet discover_versions(const VersionQuery& query, const VersionProvider& provider) {
  VersionSet out;
  out.source = provider.name();
  out.records = provider.lookup(query);
  if (out.records.empty()) {
    throw DiscoveryError("no versions found for image '" + query.image_id + "'");
  }
  std::set<std::string> ids;
  std::vector<ValidationViolation> dupes;
  for (const auto& r : out.records) {
    if (!ids.insert(r.id).second) dupes.push_back({r.id, "id", "duplicate id '" + r.id + "'"});
  }
  if (!dupes.empty()) throw ValidationError(std::move(dupes));
  return out;
}

std::vector<ImageServiceRecord> sort_by_upload(std::vector<ImageServiceRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (a.upload_time != b.upload_time) return a.upload_time < b.upload_time;
    return a.id < b.id;
  });
  return records;
}

std::vector<ImageServiceRecord> sort_by_upload(const VersionSet& versions) {
  return sort_by_upload(versions.records);
}

}  // namespace provtree
