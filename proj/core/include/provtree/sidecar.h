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

// Reader and writer for the sidecar metadata format.
//
// A sidecar document is a JSON object per record:
//
//   {
//     "id": "v1",
//     "upload_time": "2020-06-15T18:00:00Z",
//     "spatial":   {"latitude": 40.7128, "longitude": -74.006, "city": "New York"},
//     "temporal":  {"datetime_original": "2020-06-15T12:30:00", "timezone_offset": -300},
//     "contextual":{"caption": "..."},
//     "camera":    {"make": "Canon", "aperture": "f/8", "exposure_time": "1/125"},
//     "environment": {"weather": "sunny"},
//     "functional":  {"capture_action": "shutter_press"},
//     "extras":    {"anything": "kept verbatim"}
//   }
//
// Timestamps without a zone designator are local time and are shifted by
// temporal.timezone_offset when present. Writing always emits canonical UTC,
// so parse_record(serialize_record(r)) == r for every canonical record.
//
// A corpus document holds {"versions": [record...], "ground_truth_tree":
// {child_id: parent_id | null}}.

#ifndef PROVTREE_SIDECAR_H_
#define PROVTREE_SIDECAR_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "provtree/model.h"

namespace provtree {

using Json = nlohmann::ordered_json;

// Syntax error in a document, with the byte offset reported by the reader.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// child id -> parent id; the root maps to nullopt.
using ParentMap = std::map<std::string, std::optional<std::string>>;

struct Corpus {
  std::vector<ImageServiceRecord> versions;
  std::optional<ParentMap> ground_truth_tree;
};

// Parses text into a JSON value; throws ParseError.
Json parse_document(std::string_view bytes);

// Throws ParseError on syntax errors and ValidationError when a field has the
// wrong type or an invariant is broken.
ImageServiceRecord parse_record(std::string_view bytes);
ImageServiceRecord record_from_json(const Json& doc);

// Like record_from_json but never throws on field problems: fields whose
// values cannot be read are left absent and reported.
struct LenientRecord {
  ImageServiceRecord record;
  std::vector<ValidationViolation> violations;
};
LenientRecord record_from_json_lenient(const Json& doc);

Json record_to_json(const ImageServiceRecord& record);
std::string serialize_record(const ImageServiceRecord& record);

Corpus parse_corpus(std::string_view bytes);
Corpus load_corpus(const std::filesystem::path& path);
Json corpus_to_json(const Corpus& corpus);
std::string serialize_corpus(const Corpus& corpus);

std::string read_file(const std::filesystem::path& path);

}  // namespace provtree

#endif  // PROVTREE_SIDECAR_H_
