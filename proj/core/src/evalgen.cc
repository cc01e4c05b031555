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

#include "provtree/evalgen.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace provtree {
namespace {

struct Story {
  const char* title;
  const char* headline;
  const char* caption;
  const char* city;
  const char* state;
  const char* country;
};

// Relocated narratives for rewrite_context. Every city is in the shipped
// gazetteer and far from the seed location.
constexpr Story kStories[] = {
    {"Flooded avenue", "Flash floods hit the capital",
     "Cars stranded on a flooded avenue after a night of heavy rain", "Kuala Lumpur",
     "Federal Territory", "Malaysia"},
    {"Bridge protest", "Thousands march across the river",
     "Protesters crowd the bridge during the evening march", "London", "England",
     "United Kingdom"},
    {"Harbour fire", "Fire breaks out near the harbour",
     "Smoke rises over the harbour as crews respond", "Sydney", "New South Wales", "Australia"},
    {"Street celebration", "Crowds celebrate the final result",
     "Fans fill the boulevard after the match", "Paris", "Ile-de-France", "France"},
    {"Rail disruption", "Commuters stranded as lines close",
     "Platform packed with commuters waiting for trains", "Tokyo", "Tokyo", "Japan"},
    {"Dust storm", "Dust storm sweeps the city",
     "Orange sky over the old quarter during the storm", "Cairo", "Cairo Governorate", "Egypt"},
    {"Carnival parade", "Parade draws record crowd",
     "Dancers and drummers lead the parade along the beach road", "Rio de Janeiro",
     "Rio de Janeiro", "Brazil"},
    {"Monsoon rain", "Monsoon floods low-lying districts",
     "Residents wade through water near the station", "Mumbai", "Maharashtra", "India"},
};
constexpr int kStoryCount = static_cast<int>(std::size(kStories));

double wrap_longitude(double lon) {
  double x = std::fmod(lon + 180.0, 360.0);
  if (x < 0) x += 360.0;
  return x - 180.0;
}

CameraAttrs& require_camera(ImageServiceRecord& r) {
  if (!r.camera) throw GenerationError("record has no camera attributes");
  return *r.camera;
}

TemporalAttrs& require_temporal(ImageServiceRecord& r) {
  if (!r.temporal) throw GenerationError("record has no temporal attributes");
  return *r.temporal;
}

std::string node_label(int node, const std::vector<int>& position) {
  return "v" + std::to_string(position[node] + 1);
}

}  // namespace

std::string_view to_string(MutationKind k) {
  switch (k) {
    case MutationKind::kShiftDatetime:
      return "shift_datetime";
    case MutationKind::kMoveGps:
      return "move_gps";
    case MutationKind::kRewriteContext:
      return "rewrite_context";
    case MutationKind::kSwapCameraModel:
      return "swap_camera_model";
    case MutationKind::kPerturbExposure:
      return "perturb_exposure";
    case MutationKind::kDesyncShutterExposure:
      return "desync_shutter_exposure";
    case MutationKind::kChangeTimezone:
      return "change_timezone";
  }
  return "shift_datetime";
}

std::optional<MutationKind> parse_mutation_kind(std::string_view s) {
  for (auto k : kAllMutationKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

const std::vector<std::pair<std::string, std::string>>& replacement_cameras() {
  static const std::vector<std::pair<std::string, std::string>> cams = {
      {"Apple", "iPhone 12"},
      {"Samsung", "Galaxy S21"},
      {"Google", "Pixel 5"},
      {"GoPro", "HERO9 Black"},
      {"Huawei", "P30 Pro"},
  };
  return cams;
}

MagnitudeBounds mutation_bounds(MutationKind k) {
  switch (k) {
    case MutationKind::kShiftDatetime:
      return {600.0, 30.0 * 86400.0, true, true};
    case MutationKind::kMoveGps:
      return {2.0, 60.0, true, false};
    case MutationKind::kRewriteContext:
      return {0.0, kStoryCount - 1.0, false, true};
    case MutationKind::kSwapCameraModel:
      return {0.0, static_cast<double>(replacement_cameras().size()) - 1.0, false, true};
    case MutationKind::kPerturbExposure:
      return {8.0, 12.0, false, false};
    case MutationKind::kDesyncShutterExposure:
      return {1.0, 4.0, true, false};
    case MutationKind::kChangeTimezone:
      return {3.0, 12.0, true, true};
  }
  return {};
}

bool in_bounds(MutationKind k, double magnitude) {
  const MagnitudeBounds b = mutation_bounds(k);
  if (!std::isfinite(magnitude)) return false;
  if (b.integral && magnitude != std::floor(magnitude)) return false;
  if (magnitude < 0 && !b.signed_values) return false;
  const double a = std::abs(magnitude);
  return a >= b.min_abs && a <= b.max_abs;
}

RuleGroup designated_group(MutationKind k) {
  switch (k) {
    case MutationKind::kShiftDatetime:
    case MutationKind::kMoveGps:
    case MutationKind::kRewriteContext:
    case MutationKind::kChangeTimezone:
      return RuleGroup::kGpsTimezone;
    case MutationKind::kSwapCameraModel:
      return RuleGroup::kCapabilities;
    case MutationKind::kPerturbExposure:
      return RuleGroup::kExposureTriangle;
    case MutationKind::kDesyncShutterExposure:
      return RuleGroup::kExposureValue;
  }
  return RuleGroup::kGpsTimezone;
}

void apply_mutation(ImageServiceRecord& r, const MutationOp& op) {
  if (!in_bounds(op.kind, op.magnitude)) {
    throw std::invalid_argument(std::string(to_string(op.kind)) + " magnitude " +
                                std::to_string(op.magnitude) + " out of bounds");
  }
  const double m = op.magnitude;
  switch (op.kind) {
    case MutationKind::kShiftDatetime: {
      auto& t = require_temporal(r);
      if (!t.datetime_original) throw GenerationError("datetime_original absent");
      *t.datetime_original += std::chrono::seconds(static_cast<int64_t>(m));
      break;
    }
    case MutationKind::kMoveGps: {
      if (!r.spatial || !r.spatial->has_gps()) throw GenerationError("GPS position absent");
      r.spatial->longitude = wrap_longitude(*r.spatial->longitude + m);
      r.spatial->latitude = std::clamp(*r.spatial->latitude + m / 4.0, -85.0, 85.0);
      break;
    }
    case MutationKind::kRewriteContext: {
      const Story& s = kStories[static_cast<int>(m)];
      ContextualAttrs& c = r.contextual ? *r.contextual : r.contextual.emplace();
      c.title = s.title;
      c.headline = s.headline;
      c.caption = s.caption;
      SpatialAttrs& sp = r.spatial ? *r.spatial : r.spatial.emplace();
      sp.city = s.city;
      sp.state = s.state;
      sp.country = s.country;
      break;
    }
    case MutationKind::kSwapCameraModel: {
      auto& c = require_camera(r);
      const auto& [make, model] = replacement_cameras()[static_cast<std::size_t>(m)];
      c.make = make;
      c.model = model;
      break;
    }
    case MutationKind::kPerturbExposure: {
      auto& c = require_camera(r);
      if (!c.exposure_time) throw GenerationError("exposure_time absent");
      *c.exposure_time /= std::exp2(m);
      if (c.shutter_speed) *c.shutter_speed += m;
      if (c.exposure_value) *c.exposure_value += m;
      break;
    }
    case MutationKind::kDesyncShutterExposure: {
      auto& c = require_camera(r);
      if (!c.exposure_time) throw GenerationError("exposure_time absent");
      *c.exposure_time *= std::exp2(m);
      break;
    }
    case MutationKind::kChangeTimezone: {
      auto& t = require_temporal(r);
      if (!t.timezone_offset) throw GenerationError("timezone_offset absent");
      constexpr int kLimit = 14 * 60;
      int shifted = *t.timezone_offset + static_cast<int>(m) * 60;
      if (std::abs(shifted) > kLimit) shifted = *t.timezone_offset - static_cast<int>(m) * 60;
      t.timezone_offset = shifted;
      break;
    }
  }
}

std::vector<std::string> check_spec(const CorpusSpec& spec) {
  std::vector<std::string> problems;
  const int n = static_cast<int>(spec.tree_shape.size());
  if (n == 0) {
    problems.push_back("tree_shape is empty");
    return problems;
  }
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const int p = spec.tree_shape[i];
    if (p == -1) {
      ++roots;
    } else if (p < 0 || p >= n || p == i) {
      problems.push_back("node " + std::to_string(i) + " has invalid parent " + std::to_string(p));
    }
  }
  if (roots != 1) problems.push_back("tree_shape must have exactly one root");
  if (problems.empty()) {
    for (int i = 0; i < n; ++i) {
      int cur = i;
      int steps = 0;
      while (spec.tree_shape[cur] != -1 && steps <= n) {
        cur = spec.tree_shape[cur];
        ++steps;
      }
      if (steps > n) {
        problems.push_back("tree_shape has a cycle through node " + std::to_string(i));
        break;
      }
    }
  }
  std::vector<int> order = spec.upload_order;
  std::sort(order.begin(), order.end());
  for (int i = 0; i < n; ++i) {
    if (order.size() != static_cast<std::size_t>(n) || order[i] != i) {
      problems.push_back("upload_order is not a permutation of the nodes");
      break;
    }
  }
  for (const auto& [child, ops] : spec.ops_per_edge) {
    if (child < 0 || child >= n || spec.tree_shape[child] == -1) {
      if (!ops.empty()) problems.push_back("ops given for non-edge node " + std::to_string(child));
      continue;
    }
    for (const auto& op : ops) {
      if (!in_bounds(op.kind, op.magnitude)) {
        problems.push_back(std::string(to_string(op.kind)) + " magnitude out of bounds on node " +
                           std::to_string(child));
      }
    }
  }
  return problems;
}

GeneratedCorpus generate_corpus(const CorpusSpec& spec) {
  if (auto problems = check_spec(spec); !problems.empty()) {
    throw std::invalid_argument("invalid corpus spec: " + problems.front());
  }
  const int n = static_cast<int>(spec.tree_shape.size());
  std::vector<int> position(n);
  for (int k = 0; k < n; ++k) position[spec.upload_order[k]] = k;

  std::vector<std::vector<int>> kids(n);
  int root = 0;
  for (int i = 0; i < n; ++i) {
    if (spec.tree_shape[i] == -1) {
      root = i;
    } else {
      kids[spec.tree_shape[i]].push_back(i);
    }
  }

  std::vector<ImageServiceRecord> by_node(n);
  by_node[root] = spec.seed_record;
  std::deque<int> queue = {root};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int c : kids[u]) {
      by_node[c] = by_node[u];
      if (auto it = spec.ops_per_edge.find(c); it != spec.ops_per_edge.end()) {
        for (const auto& op : it->second) {
          try {
            apply_mutation(by_node[c], op);
          } catch (const GenerationError& e) {
            throw GenerationError("edge " + node_label(u, position) + " -> " +
                                  node_label(c, position) + ": " + std::string(to_string(op.kind)) +
                                  " not applicable, " + e.what());
          }
        }
      }
      queue.push_back(c);
    }
  }

  // Uploads are at least an hour apart.
  Rng rng(spec.rng_seed);
  Timestamp t = spec.seed_record.upload_time;
  GeneratedCorpus out;
  ParentMap parents;
  for (int k = 0; k < n; ++k) {
    const int node = spec.upload_order[k];
    if (k > 0) t += std::chrono::seconds(3600 + 60 * rng.range(0, 1439));
    ImageServiceRecord r = by_node[node];
    r.id = node_label(node, position);
    r.upload_time = t;
    out.versions.push_back(std::move(r));
    const int p = spec.tree_shape[node];
    parents[node_label(node, position)] =
        p == -1 ? std::nullopt : std::optional<std::string>(node_label(p, position));
  }
  std::vector<std::string> ids;
  for (const auto& v : out.versions) ids.push_back(v.id);
  out.truth = tree_from_parent_map(ids, parents);
  return out;
}

MutationOp random_op(Rng& rng, MutationKind kind) {
  const MagnitudeBounds b = mutation_bounds(kind);
  double m;
  if (b.integral) {
    m = static_cast<double>(
        rng.range(static_cast<int64_t>(b.min_abs), static_cast<int64_t>(b.max_abs)));
  } else {
    m = rng.uniform(b.min_abs, b.max_abs);
  }
  if (b.signed_values && rng.bernoulli(0.5)) m = -m;
  return {kind, m};
}

MutationOp random_op(Rng& rng) {
  return random_op(rng, kAllMutationKinds[rng.below(kAllMutationKinds.size())]);
}

std::vector<int> random_pruefer(std::size_t n, Rng& rng) {
  std::vector<int> code(n >= 2 ? n - 2 : 0);
  for (auto& c : code) c = static_cast<int>(rng.below(n));
  return code;
}

std::vector<int> pruefer_to_parents(const std::vector<int>& code, std::size_t n, int root) {
  if (n == 0) return {};
  if (code.size() + 2 != n && !(n == 1 && code.empty())) {
    throw std::invalid_argument("Prüfer code length must be n - 2");
  }
  std::vector<int> parents(n, -1);
  if (n == 1) return parents;
  std::vector<int> degree(n, 1);
  for (int c : code) {
    if (c < 0 || c >= static_cast<int>(n)) throw std::invalid_argument("Prüfer label out of range");
    ++degree[c];
  }
  std::vector<std::vector<int>> adj(n);
  std::set<int> leaves;
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] == 1) leaves.insert(static_cast<int>(i));
  }
  for (int c : code) {
    const int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    adj[leaf].push_back(c);
    adj[c].push_back(leaf);
    if (--degree[c] == 1) leaves.insert(c);
  }
  const int u = *leaves.begin();
  const int v = *std::next(leaves.begin());
  adj[u].push_back(v);
  adj[v].push_back(u);

  std::vector<bool> seen(n, false);
  std::deque<int> queue = {root};
  seen[root] = true;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    for (int y : adj[x]) {
      if (seen[y]) continue;
      seen[y] = true;
      parents[y] = x;
      queue.push_back(y);
    }
  }
  return parents;
}

std::vector<int> parents_to_pruefer(const std::vector<int>& parents) {
  const std::size_t n = parents.size();
  if (n <= 2) return {};
  std::vector<std::set<int>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (parents[i] >= 0) {
      adj[i].insert(parents[i]);
      adj[parents[i]].insert(static_cast<int>(i));
    }
  }
  std::set<int> leaves;
  for (std::size_t i = 0; i < n; ++i) {
    if (adj[i].size() == 1) leaves.insert(static_cast<int>(i));
  }
  std::vector<int> code;
  while (code.size() + 2 < n) {
    const int leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    const int nb = *adj[leaf].begin();
    code.push_back(nb);
    adj[nb].erase(leaf);
    adj[leaf].clear();
    if (adj[nb].size() == 1) leaves.insert(nb);
  }
  return code;
}

CorpusSpec random_spec(std::size_t n_nodes, std::size_t n_ops_per_edge, uint64_t rng_seed,
                       const ImageServiceRecord& seed_record) {
  if (n_nodes < 1) throw std::invalid_argument("n_nodes must be >= 1");
  Rng rng(rng_seed);
  CorpusSpec spec;
  spec.seed_record = seed_record;
  spec.rng_seed = rng_seed;
  const auto code = random_pruefer(n_nodes, rng);
  const int root = static_cast<int>(rng.below(n_nodes));
  spec.tree_shape = pruefer_to_parents(code, n_nodes, root);
  spec.upload_order.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) spec.upload_order[i] = static_cast<int>(i);
  rng.shuffle(spec.upload_order);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (spec.tree_shape[i] == -1) continue;
    auto& ops = spec.ops_per_edge[static_cast<int>(i)];
    for (std::size_t k = 0; k < n_ops_per_edge; ++k) ops.push_back(random_op(rng));
  }
  return spec;
}

CorpusSpec sample_experiment_spec(std::size_t n_nodes, Rng& rng, const SamplerParams& sampler,
                                  const ImageServiceRecord& seed_record) {
  if (n_nodes < 1) throw std::invalid_argument("n_nodes must be >= 1");
  CorpusSpec spec;
  spec.seed_record = seed_record;
  spec.tree_shape.assign(n_nodes, -1);
  for (std::size_t i = 1; i < n_nodes; ++i) {
    spec.tree_shape[i] = rng.bernoulli(sampler.chain_bias) ? static_cast<int>(i - 1)
                                                          : static_cast<int>(rng.below(i));
    const int count = static_cast<int>(rng.range(sampler.min_ops, sampler.max_ops));
    auto& ops = spec.ops_per_edge[static_cast<int>(i)];
    for (int k = 0; k < count; ++k) ops.push_back(random_op(rng));
  }
  spec.upload_order.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) spec.upload_order[i] = static_cast<int>(i);
  for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
    if (rng.bernoulli(sampler.upload_swap)) std::swap(spec.upload_order[k], spec.upload_order[k + 1]);
  }
  spec.rng_seed = rng.next();
  return spec;
}

Json spec_to_json(const CorpusSpec& spec) {
  Json ops = Json::object();
  for (const auto& [child, list] : spec.ops_per_edge) {
    Json arr = Json::array();
    for (const auto& op : list) {
      arr.push_back({{"kind", std::string(to_string(op.kind))}, {"magnitude", op.magnitude}});
    }
    ops[std::to_string(child)] = std::move(arr);
  }
  return Json{{"seed_record", record_to_json(spec.seed_record)},
              {"tree_shape", spec.tree_shape},
              {"ops_per_edge", std::move(ops)},
              {"rng_seed", spec.rng_seed},
              {"upload_order", spec.upload_order}};
}

CorpusSpec spec_from_json(const Json& doc, const ImageServiceRecord* default_seed) {
  CorpusSpec spec;
  try {
    if (auto it = doc.find("seed_record"); it != doc.end()) {
      spec.seed_record = record_from_json(*it);
    } else if (default_seed) {
      spec.seed_record = *default_seed;
    } else {
      throw std::invalid_argument("corpus spec has no seed_record");
    }
    spec.tree_shape = doc.at("tree_shape").get<std::vector<int>>();
    spec.rng_seed = doc.value("rng_seed", uint64_t{0});
    if (auto it = doc.find("upload_order"); it != doc.end()) {
      spec.upload_order = it->get<std::vector<int>>();
    } else {
      for (std::size_t i = 0; i < spec.tree_shape.size(); ++i) {
        spec.upload_order.push_back(static_cast<int>(i));
      }
    }
    if (auto it = doc.find("ops_per_edge"); it != doc.end()) {
      for (auto e = it->begin(); e != it->end(); ++e) {
        const int child = std::stoi(e.key());
        auto& list = spec.ops_per_edge[child];
        for (const auto& o : e.value()) {
          const std::string name = o.at("kind").get<std::string>();
          auto kind = parse_mutation_kind(name);
          if (!kind) throw std::invalid_argument("unknown mutation kind '" + name + "'");
          list.push_back({*kind, o.at("magnitude").get<double>()});
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed corpus spec: ") + e.what());
  } catch (const std::logic_error& e) {
    throw std::invalid_argument(std::string("malformed corpus spec: ") + e.what());
  }
  return spec;
}

Json generated_corpus_to_json(const GeneratedCorpus& corpus) {
  Corpus c;
  c.versions = corpus.versions;
  ParentMap parents;
  for (const auto& n : corpus.truth.nodes) {
    auto it = corpus.truth.parent.find(n);
    parents[n] = it == corpus.truth.parent.end() ? std::nullopt
                                                 : std::optional<std::string>(it->second);
  }
  c.ground_truth_tree = std::move(parents);
  return corpus_to_json(c);
}

}  // namespace provtree
