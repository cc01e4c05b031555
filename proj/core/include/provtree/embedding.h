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

// Places every version of an image in a shared attribute space.
//
// Each attribute group becomes a point: its fields are read from the record,
// text fields are feature-hashed, and every dimension is min-max normalized
// across the version set so points of different versions are directly
// comparable. A version is a Cluster of group points plus a normalized
// upload-time coordinate.

#ifndef PROVTREE_EMBEDDING_H_
#define PROVTREE_EMBEDDING_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "provtree/model.h"
#include "provtree/sidecar.h"

namespace provtree {

enum class DimKind { kNumeric, kAngularDegrees, kText };

struct DimSpec {
  std::string field;  // model field path, e.g. "camera.aperture"
  DimKind kind = DimKind::kNumeric;
  int text_dims = 0;  // kText only; 0 means EmbeddingConfig::text_dims
};

struct GroupSchema {
  std::string group_id;
  std::vector<DimSpec> dims;

  int dimension(int default_text_dims) const;
};

struct EmbeddingConfig {
  int text_dims = 64;
};

struct AttributeVector {
  std::string version_id;
  std::string group_id;
  Eigen::VectorXd values;  // entries in [0, 1]
};

struct Cluster {
  std::string version_id;
  std::map<std::string, AttributeVector> points;  // by group id; groups without data absent
  double t_upload = 0.5;
};

// Schemas for the nine rule groups plus a contextual text group.
std::vector<GroupSchema> default_group_schemas();

// {"groups": [{"group_id": "...", "dims": [{"field": "...", "kind":
// "numeric|angular|text", "text_dims": 8}]}]}. Throws std::invalid_argument
// for unknown fields or kinds.
std::vector<GroupSchema> group_schemas_from_json(const Json& doc);
std::vector<GroupSchema> load_group_schemas(const std::filesystem::path& path);
Json group_schemas_to_json(const std::vector<GroupSchema>& schemas);

// Field accessors over the model, by dotted path. Timestamps read as Unix
// seconds, white balance as its enum ordinal.
std::optional<double> numeric_field(const ImageServiceRecord& r, std::string_view path);
std::optional<std::string> text_field(const ImageServiceRecord& r, std::string_view path);
bool is_known_field(std::string_view path, DimKind kind);

// Min-max over one dimension. A flat dimension maps to 0.5.
std::vector<double> normalize(std::span<const double> values);

// Lowercased tokens split on whitespace and ASCII punctuation.
std::vector<std::string> tokenize(std::string_view text);

// Token counts hashed (FNV-1a, 64 bit) into `dims` buckets, L2-normalized.
// Empty text gives the zero vector.
Eigen::VectorXd embed_text(std::string_view text, int dims = 64);

// Cosine similarity; 0 if either vector is zero.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// One cluster per version, in input order.
std::vector<Cluster> build_clusters(const std::vector<ImageServiceRecord>& versions,
                                    const std::vector<GroupSchema>& schemas,
                                    const EmbeddingConfig& config = {});

// Fraction of groups present in both clusters whose points are within
// Euclidean distance epsilon. Upload time is not a coordinate here.
double intersection_score(const Cluster& a, const Cluster& b, double epsilon);

Json clusters_to_json(const std::vector<Cluster>& clusters);

}  // namespace provtree

#endif  // PROVTREE_EMBEDDING_H_
