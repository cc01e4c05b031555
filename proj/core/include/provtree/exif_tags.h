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

#ifndef PROVTREE_EXIF_TAGS_H_
#define PROVTREE_EXIF_TAGS_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "provtree/model.h"

namespace provtree {

// Flat tag-name -> value map as produced by common EXIF/IPTC extractors
// (exiftool, metadata-extractor).
using TagMap = std::map<std::string, std::string>;

struct CanonicalizeResult {
  ImageServiceRecord record;
  // One entry per mapped tag whose value could not be used. The offending
  // field is left absent in `record`.
  std::vector<ValidationViolation> violations;
};

// Maps extractor tags onto the canonical model. The id and upload time come
// from the caller since tags never carry them. Unmapped tags land in extras
// under "tag.<Name>".
CanonicalizeResult canonicalize_tags(const TagMap& raw, std::string id = {},
                                     Timestamp upload_time = {});

// Every tag name the mapper understands, with the model field it feeds.
const std::vector<std::pair<std::string_view, std::string_view>>& tag_mapping_table();

}  // namespace provtree

#endif  // PROVTREE_EXIF_TAGS_H_
