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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "provtree/geo.h"

namespace provtree {
namespace {

constexpr double kTieTolerance = 1e-9;

void require_nonempty(const std::vector<ImageServiceRecord>& versions) {
  if (versions.empty()) throw std::invalid_argument("cannot build a tree over zero versions");
}

// Fills edge annotations for every parent link already in the tree.
void annotate(VersionTree& tree, const std::vector<ImageServiceRecord>& versions,
              const std::map<std::string, std::size_t>& index, PairFitter& fitter,
              int text_dims) {
  for (const auto& [child, parent] : tree.parent) {
    const std::size_t c = index.at(child);
    const std::size_t p = index.at(parent);
    const PairTransforms& pt = fitter.get(p, c);
    EdgeAnnotation& e = tree.edges[child];
    e.total_complexity = pt.total_complexity;
    e.kind_per_group = pt.kinds();
    e.diff = semantic_diff(versions[p], versions[c], text_dims);
  }
}

std::map<std::string, std::size_t> index_of(const std::vector<ImageServiceRecord>& versions) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < versions.size(); ++i) index.emplace(versions[i].id, i);
  return index;
}

VersionTree skeleton(const std::vector<ImageServiceRecord>& versions) {
  VersionTree t;
  for (const auto& v : versions) t.nodes.push_back(v.id);
  return t;
}

bool derivable(PairFitter& fitter, std::size_t from, std::size_t to, double accept) {
  const PairTransforms& pt = fitter.get(from, to);
  if (pt.fits.empty()) return false;
  return std::all_of(pt.fits.begin(), pt.fits.end(), [&](const auto& kv) {
    return kv.second.feasible() && kv.second.complexity <= accept;
  });
}

// Prüfer sequence -> undirected edge list over n labels.
std::vector<std::pair<int, int>> decode_pruefer(const std::vector<int>& seq, int n) {
  std::vector<int> degree(n, 1);
  for (int s : seq) ++degree[s];
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n - 1);
  for (int s : seq) {
    for (int leaf = 0; leaf < n; ++leaf) {
      if (degree[leaf] == 1) {
        edges.emplace_back(leaf, s);
        --degree[leaf];
        --degree[s];
        break;
      }
    }
  }
  int u = -1;
  int v = -1;
  for (int i = 0; i < n; ++i) {
    if (degree[i] == 1) (u < 0 ? u : v) = i;
  }
  edges.emplace_back(u, v);
  return edges;
}

// Tie key for one parent choice: an earlier upload close to the child sorts
// first, later uploads after every earlier one.
int tie_key(int child, int parent, int n) {
  return parent < child ? child - parent : n + parent - child;
}

}  // namespace

double VersionTree::total_weight() const {
  double w = 0.0;
  for (const auto& [_, e] : edges) w += e.total_complexity;
  return w;
}

std::vector<std::string> VersionTree::children(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& n : nodes) {
    auto it = parent.find(n);
    if (it != parent.end() && it->second == id) out.push_back(n);
  }
  return out;
}

std::vector<std::string> check_tree(const VersionTree& tree) {
  std::vector<std::string> problems;
  const std::set<std::string> nodes(tree.nodes.begin(), tree.nodes.end());
  if (nodes.size() != tree.nodes.size()) problems.push_back("duplicate node ids");
  if (nodes.empty()) {
    problems.push_back("no nodes");
    return problems;
  }
  if (!nodes.contains(tree.root)) problems.push_back("root '" + tree.root + "' is not a node");
  if (tree.parent.contains(tree.root)) problems.push_back("root has a parent");
  if (tree.parent.size() + 1 != nodes.size()) {
    problems.push_back("expected " + std::to_string(nodes.size() - 1) + " parent links, found " +
                       std::to_string(tree.parent.size()));
  }
  for (const auto& [child, parent] : tree.parent) {
    if (!nodes.contains(child)) problems.push_back("unknown child '" + child + "'");
    if (!nodes.contains(parent)) problems.push_back("unknown parent '" + parent + "'");
    if (child == parent) problems.push_back("self loop at '" + child + "'");
  }
  for (const auto& [child, _] : tree.edges) {
    if (!tree.parent.contains(child)) problems.push_back("annotation without edge at '" + child + "'");
  }
  if (!problems.empty()) return problems;
  for (const auto& n : tree.nodes) {
    std::string cur = n;
    std::size_t steps = 0;
    while (cur != tree.root) {
      auto it = tree.parent.find(cur);
      if (it == tree.parent.end() || ++steps > nodes.size()) {
        problems.push_back("'" + n + "' does not reach the root");
        break;
      }
      cur = it->second;
    }
  }
  return problems;
}

VersionTree tree_from_parent_map(const std::vector<std::string>& nodes, const ParentMap& parents) {
  VersionTree t;
  t.nodes = nodes;
  int roots = 0;
  for (const auto& n : nodes) {
    auto it = parents.find(n);
    if (it == parents.end()) throw std::invalid_argument("no parent entry for '" + n + "'");
    if (it->second) {
      t.parent[n] = *it->second;
    } else {
      t.root = n;
      ++roots;
    }
  }
  if (roots != 1) throw std::invalid_argument("parent map must have exactly one root");
  if (parents.size() != nodes.size()) throw std::invalid_argument("parent map has extra entries");
  if (auto problems = check_tree(t); !problems.empty()) {
    throw std::invalid_argument("invalid tree: " + problems.front());
  }
  return t;
}

void validate(const HeuristicParams& p) {
  if (!(p.epsilon > 0.0)) throw std::invalid_argument("heuristic.epsilon must be > 0");
  if (!(p.threshold0 >= 0.0)) throw std::invalid_argument("heuristic.threshold0 must be >= 0");
  if (!(p.growth > 1.0)) throw std::invalid_argument("heuristic.growth must be > 1");
  if (!(p.gain > 0.0)) throw std::invalid_argument("heuristic.gain must be > 0");
  if (p.max_passes < 0) throw std::invalid_argument("heuristic.max_passes must be >= 0");
  if (!(p.accept_complexity >= 0.0)) {
    throw std::invalid_argument("heuristic.accept_complexity must be >= 0");
  }
  if (p.candidate_k < 1) throw std::invalid_argument("heuristic.candidate_k must be >= 1");
}

PairFitter::PairFitter(const std::vector<Cluster>& clusters, const TransformOptions& options)
    : clusters_(clusters), options_(options) {
  cache_.resize(clusters.size());
  for (auto& row : cache_) row.resize(clusters.size());
}

const PairTransforms& PairFitter::get(std::size_t from, std::size_t to) {
  auto& slot = cache_.at(from).at(to);
  if (!slot) {
    slot = std::make_unique<PairTransforms>(
        pair_transforms_lenient(clusters_[from], clusters_[to], options_, &counter_));
  }
  return *slot;
}

std::vector<std::size_t> reorder_sequence(const std::vector<Cluster>& clusters,
                                          const HeuristicParams& params, PairFitter& fitter,
                                          BuildStats* stats) {
  const std::size_t n = clusters.size();
  std::vector<std::size_t> seq(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = i;
  if (n < 3) return seq;

  auto overlap = [&](std::size_t a, std::size_t b) {
    return intersection_score(clusters[a], clusters[b], params.epsilon);
  };
  // Overlap gain at window center i: ov(C_i, C_{i+1}) - ov(C_{i-1}, C_i).
  auto criterion = [&](std::size_t i) {
    if (i < 1 || i + 1 >= n) return 0.0;
    return overlap(seq[i], seq[i + 1]) - overlap(seq[i - 1], seq[i]);
  };

  double threshold = params.threshold0;
  for (int pass = 0; pass < params.max_passes; ++pass) {
    bool swapped = false;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double gain = criterion(i);
      if (!(gain > 0.0) || gain < threshold) continue;
      const std::size_t x = seq[i - 1];
      const std::size_t y = seq[i];
      const std::size_t z = seq[i + 1];
      if (!derivable(fitter, x, z, params.accept_complexity) ||
          !derivable(fitter, z, y, params.accept_complexity)) {
        continue;
      }
      const double previous = criterion(i - 1);
      std::swap(seq[i], seq[i + 1]);
      threshold = params.growth * threshold + params.gain * std::abs(gain - previous);
      swapped = true;
      if (stats) {
        ++stats->swaps;
        stats->thresholds.push_back(threshold);
      }
    }
    if (!swapped) break;
  }
  return seq;
}

std::vector<std::size_t> reorder_sequence(const std::vector<Cluster>& clusters,
                                          const HeuristicParams& params,
                                          const TransformOptions& transform) {
  PairFitter fitter(clusters, transform);
  return reorder_sequence(clusters, params, fitter);
}

VersionTree build_baseline_chain(const std::vector<ImageServiceRecord>& versions,
                                 const std::vector<GroupSchema>& schemas,
                                 const TreeOptions& options, BuildStats* stats) {
  require_nonempty(versions);
  const auto clusters = build_clusters(versions, schemas, options.embedding);
  PairFitter fitter(clusters, options.transform);
  VersionTree tree = skeleton(versions);
  tree.root = versions.front().id;
  for (std::size_t i = 1; i < versions.size(); ++i) tree.parent[versions[i].id] = versions[i - 1].id;
  annotate(tree, versions, index_of(versions), fitter, options.embedding.text_dims);
  if (stats) stats->fit_count += fitter.fit_count();
  return tree;
}

VersionTree build_tree_heuristic(const std::vector<ImageServiceRecord>& versions,
                                 const std::vector<GroupSchema>& schemas,
                                 const TreeOptions& options, BuildStats* stats) {
  require_nonempty(versions);
  const HeuristicParams& params = options.heuristic;
  validate(params);
  const auto clusters = build_clusters(versions, schemas, options.embedding);
  PairFitter fitter(clusters, options.transform);
  const auto seq = reorder_sequence(clusters, params, fitter, stats);

  VersionTree tree = skeleton(versions);
  tree.root = versions[seq.front()].id;
  std::set<std::string> forced;
  for (std::size_t pos = 1; pos < seq.size(); ++pos) {
    const std::size_t x = seq[pos];
    for (std::size_t j = 0; j < pos; ++j) fitter.get(seq[j], x);

    // Candidate parents: per group, the placed nodes whose delta is nearest
    // to the identity. The pool runs newest first so ranking ties keep the
    // most recent placements.
    std::set<std::size_t> candidates;
    for (const auto& [gid, point] : clusters[x].points) {
      std::vector<TransformFit> pool;
      std::vector<std::size_t> owner;
      for (std::size_t j = pos; j-- > 0;) {
        const auto& fits = fitter.get(seq[j], x).fits;
        auto it = fits.find(gid);
        if (it == fits.end() || !it->second.feasible()) continue;
        pool.push_back(it->second);
        owner.push_back(j);
      }
      for (const auto& r : nearest_neighbors(identity_fit(point.values.size()), pool,
                                             params.candidate_k)) {
        candidates.insert(owner[r.index]);
      }
    }
    if (candidates.empty()) {
      for (std::size_t j = 0; j < pos; ++j) candidates.insert(j);
    }

    // Latest placed wins ties, so a run of identical versions stays a chain.
    std::optional<std::size_t> best;
    double best_w = std::numeric_limits<double>::infinity();
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
      const double w = fitter.weight(seq[*it], x);
      if (w <= params.accept_complexity && w < best_w - kTieTolerance) {
        best = *it;
        best_w = w;
      }
    }
    if (!best) {
      for (std::size_t j = pos; j-- > 0;) {
        const double w = fitter.weight(seq[j], x);
        if (w < best_w - kTieTolerance) {
          best = j;
          best_w = w;
        }
      }
      forced.insert(versions[x].id);
    }
    tree.parent[versions[x].id] = versions[seq[*best]].id;
  }
  annotate(tree, versions, index_of(versions), fitter, options.embedding.text_dims);
  for (const auto& id : forced) tree.edges[id].forced = true;
  if (stats) {
    stats->fit_count += fitter.fit_count();
    stats->order = seq;
  }
  return tree;
}

VersionTree build_tree_bruteforce(const std::vector<ImageServiceRecord>& versions,
                                  const std::vector<GroupSchema>& schemas,
                                  const TreeOptions& options, BuildStats* stats) {
  require_nonempty(versions);
  if (versions.size() > options.n_max) {
    throw SizeGuardError("brute force is limited to " + std::to_string(options.n_max) +
                         " versions, got " + std::to_string(versions.size()));
  }
  const int n = static_cast<int>(versions.size());
  const auto clusters = build_clusters(versions, schemas, options.embedding);
  PairFitter fitter(clusters, options.transform);
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) w[i][j] = fitter.weight(i, j);
    }
  }

  std::vector<int> best_parent(n, -1);
  int best_root = 0;
  double best_w = std::numeric_limits<double>::infinity();

  if (n > 1) {
    std::vector<int> seq(n - 2, 0);
    std::vector<std::vector<int>> adj(n);
    std::vector<int> parent(n);
    std::vector<int> stack;
    while (true) {
      const auto edges = decode_pruefer(seq, n);
      for (auto& a : adj) a.clear();
      for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
      }
      for (int root = 0; root < n; ++root) {
        std::fill(parent.begin(), parent.end(), -2);
        parent[root] = -1;
        stack.assign(1, root);
        double total = 0.0;
        while (!stack.empty()) {
          const int u = stack.back();
          stack.pop_back();
          for (int v : adj[u]) {
            if (parent[v] != -2) continue;
            parent[v] = u;
            total += w[u][v];
            stack.push_back(v);
          }
        }
        bool take = false;
        if (total < best_w - kTieTolerance) {
          take = true;
        } else if (total <= best_w + kTieTolerance) {
          if (root != best_root) {
            take = root < best_root;
          } else {
            for (int c = 0; c < n; ++c) {
              if (c == root) continue;
              const int a = tie_key(c, parent[c], n);
              const int b = tie_key(c, best_parent[c], n);
              if (a != b) {
                take = a < b;
                break;
              }
            }
          }
        }
        if (take) {
          best_w = total;
          best_root = root;
          best_parent = parent;
        }
      }
      // Next Prüfer sequence in lexicographic order.
      int k = n - 3;
      while (k >= 0 && seq[k] == n - 1) seq[k--] = 0;
      if (k < 0) break;
      ++seq[k];
    }
  }

  VersionTree tree = skeleton(versions);
  tree.root = versions[best_root].id;
  for (int c = 0; c < n; ++c) {
    if (c != best_root) tree.parent[versions[c].id] = versions[best_parent[c]].id;
  }
  annotate(tree, versions, index_of(versions), fitter, options.embedding.text_dims);
  if (stats) stats->fit_count += fitter.fit_count();
  return tree;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kBaseline:
      return "baseline";
    case Strategy::kHeuristic:
      return "heuristic";
    case Strategy::kBruteforce:
      return "bruteforce";
  }
  return "baseline";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "baseline") return Strategy::kBaseline;
  if (s == "heuristic") return Strategy::kHeuristic;
  if (s == "bruteforce") return Strategy::kBruteforce;
  return std::nullopt;
}

VersionTree build_tree(Strategy s, const std::vector<ImageServiceRecord>& versions,
                       const std::vector<GroupSchema>& schemas, const TreeOptions& options,
                       BuildStats* stats) {
  switch (s) {
    case Strategy::kBaseline:
      return build_baseline_chain(versions, schemas, options, stats);
    case Strategy::kHeuristic:
      return build_tree_heuristic(versions, schemas, options, stats);
    case Strategy::kBruteforce:
      return build_tree_bruteforce(versions, schemas, options, stats);
  }
  return build_baseline_chain(versions, schemas, options, stats);
}

SemanticDiff semantic_diff(const ImageServiceRecord& parent, const ImageServiceRecord& child,
                           int text_dims) {
  SemanticDiff d;
  const SpatialAttrs none;
  const SpatialAttrs& sp = parent.spatial ? *parent.spatial : none;
  const SpatialAttrs& sc = child.spatial ? *child.spatial : none;
  if (sp.has_gps() && sc.has_gps()) {
    d.delta_spatial_km = haversine_km(*sp.latitude, *sp.longitude, *sc.latitude, *sc.longitude);
  }
  if (sp.city != sc.city) d.changed_labels.push_back("city");
  if (sp.state != sc.state) d.changed_labels.push_back("state");
  if (sp.country != sc.country) d.changed_labels.push_back("country");

  if (parent.temporal && child.temporal && parent.temporal->datetime_original &&
      child.temporal->datetime_original) {
    d.delta_temporal_s = static_cast<double>(
        (*child.temporal->datetime_original - *parent.temporal->datetime_original).count());
  }

  const std::string tp = parent.contextual ? parent.contextual->joined() : "";
  const std::string tc = child.contextual ? child.contextual->joined() : "";
  const Eigen::VectorXd ep = embed_text(tp, text_dims);
  const Eigen::VectorXd ec = embed_text(tc, text_dims);
  if (ep.norm() > 0.0 || ec.norm() > 0.0) {
    d.delta_context = std::clamp(1.0 - cosine_similarity(ep, ec), 0.0, 1.0);
  }
  return d;
}

double tree_accuracy(const VersionTree& constructed, const VersionTree& truth) {
  const std::set<std::string> a(constructed.nodes.begin(), constructed.nodes.end());
  const std::set<std::string> b(truth.nodes.begin(), truth.nodes.end());
  if (a != b || a.empty()) throw std::invalid_argument("trees cover different node sets");
  std::size_t matched = 0;
  for (const auto& n : a) {
    auto pa = constructed.parent.find(n);
    auto pb = truth.parent.find(n);
    const bool root_a = pa == constructed.parent.end();
    const bool root_b = pb == truth.parent.end();
    if (root_a && root_b) {
      ++matched;
    } else if (!root_a && !root_b && pa->second == pb->second) {
      ++matched;
    }
  }
  return static_cast<double>(matched) / static_cast<double>(a.size());
}

}  // namespace provtree
