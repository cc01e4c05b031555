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

// Version-tree construction.
//
// Three builders share one edge weight, the total transform complexity from
// parent to child:
//
//   baseline    chain in upload order
//   heuristic   reorder the upload sequence with a thresholded overlap
//               criterion, then attach each version to its cheapest placed
//               predecessor
//   bruteforce  minimum-weight rooted spanning tree by exhaustive search
//
// All builders are deterministic. Ties prefer the closest earlier upload.

#ifndef PROVTREE_VERSIONTREE_H_
#define PROVTREE_VERSIONTREE_H_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "provtree/embedding.h"
#include "provtree/model.h"
#include "provtree/sidecar.h"
#include "provtree/transform.h"

namespace provtree {

class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SemanticDiff {
  double delta_spatial_km = 0.0;
  std::vector<std::string> changed_labels;  // subset of {city, state, country}
  double delta_temporal_s = 0.0;
  double delta_context = 0.0;

  bool operator==(const SemanticDiff&) const = default;
};

struct EdgeAnnotation {
  double total_complexity = 0.0;
  std::map<std::string, GroupFitKind> kind_per_group;
  SemanticDiff diff;
  bool forced = false;  // no candidate passed accept_complexity
};

struct VersionTree {
  std::vector<std::string> nodes;  // upload order
  std::string root;
  std::map<std::string, std::string> parent;  // child -> parent; root absent
  std::map<std::string, EdgeAnnotation> edges;

  double total_weight() const;
  std::vector<std::string> children(std::string_view id) const;
};

// Problems with the tree structure; empty when the tree is valid.
std::vector<std::string> check_tree(const VersionTree& tree);

// Builds a tree from a bare parent map (e.g. a ground truth); no annotations.
VersionTree tree_from_parent_map(const std::vector<std::string>& nodes, const ParentMap& parents);

struct HeuristicParams {
  double epsilon = 0.1;             // intersection tolerance, Euclidean in [0,1]^d
  double threshold0 = 0.0;
  double growth = 1.5;              // > 1
  double gain = 0.1;                // > 0
  int max_passes = 10;
  double accept_complexity = 5.0;   // edge feasibility cap
  std::size_t candidate_k = 3;      // nearest neighbors kept per group
};

// Throws std::invalid_argument naming the first bad field.
void validate(const HeuristicParams& p);

struct TreeOptions {
  EmbeddingConfig embedding;
  TransformOptions transform;
  HeuristicParams heuristic;
  std::size_t n_max = 8;            // brute-force guard
};

struct BuildStats {
  std::size_t fit_count = 0;        // choose_transform invocations
  std::size_t swaps = 0;
  std::vector<double> thresholds;   // threshold after each executed swap
  std::vector<std::size_t> order;   // heuristic sequence after reordering
};

// Memoized all-pairs edge weights over one cluster list.
class PairFitter {
 public:
  PairFitter(const std::vector<Cluster>& clusters, const TransformOptions& options);

  const PairTransforms& get(std::size_t from, std::size_t to);
  double weight(std::size_t from, std::size_t to) { return get(from, to).total_complexity; }
  std::size_t fit_count() const { return counter_.fits; }
  std::size_t size() const { return clusters_.size(); }
  const Cluster& cluster(std::size_t i) const { return clusters_[i]; }

 private:
  const std::vector<Cluster>& clusters_;
  TransformOptions options_;
  FitCounter counter_;
  std::vector<std::vector<std::unique_ptr<PairTransforms>>> cache_;
};

// Returns a permutation of cluster indices. The first position never moves.
std::vector<std::size_t> reorder_sequence(const std::vector<Cluster>& clusters,
                                          const HeuristicParams& params,
                                          PairFitter& fitter, BuildStats* stats = nullptr);
std::vector<std::size_t> reorder_sequence(const std::vector<Cluster>& clusters,
                                          const HeuristicParams& params,
                                          const TransformOptions& transform = {});

// `versions` must be in upload order (see sort_by_upload).
VersionTree build_baseline_chain(const std::vector<ImageServiceRecord>& versions,
                                 const std::vector<GroupSchema>& schemas,
                                 const TreeOptions& options = {}, BuildStats* stats = nullptr);
VersionTree build_tree_heuristic(const std::vector<ImageServiceRecord>& versions,
                                 const std::vector<GroupSchema>& schemas,
                                 const TreeOptions& options = {}, BuildStats* stats = nullptr);
// Throws SizeGuardError above options.n_max versions.
VersionTree build_tree_bruteforce(const std::vector<ImageServiceRecord>& versions,
                                  const std::vector<GroupSchema>& schemas,
                                  const TreeOptions& options = {}, BuildStats* stats = nullptr);

enum class Strategy { kBaseline, kHeuristic, kBruteforce };
std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);
VersionTree build_tree(Strategy s, const std::vector<ImageServiceRecord>& versions,
                       const std::vector<GroupSchema>& schemas, const TreeOptions& options = {},
                       BuildStats* stats = nullptr);

SemanticDiff semantic_diff(const ImageServiceRecord& parent, const ImageServiceRecord& child,
                           int text_dims = 64);

// Fraction of nodes whose parent (or root status) agrees with truth. Throws
// std::invalid_argument when the node sets differ.
double tree_accuracy(const VersionTree& constructed, const VersionTree& truth);

// Output formats.
std::string tree_to_dot(const VersionTree& tree, const std::vector<ImageServiceRecord>& versions);
Json tree_to_json(const VersionTree& tree);
Json semantic_diff_to_json(const SemanticDiff& d);

}  // namespace provtree

#endif  // PROVTREE_VERSIONTREE_H_
