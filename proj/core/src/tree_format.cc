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

#include <cstdio>
#include <sstream>

#include "provtree/versiontree.h"

namespace provtree {
namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string dot_id(std::string_view s) { return "\"" + escape(s) + "\""; }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

Json semantic_diff_to_json(const SemanticDiff& d) {
  return Json{{"delta_spatial_km", d.delta_spatial_km},
              {"changed_labels", d.changed_labels},
              {"delta_temporal_s", d.delta_temporal_s},
              {"delta_context", d.delta_context}};
}

Json tree_to_json(const VersionTree& tree) {
  Json parent = Json::object();
  Json edges = Json::object();
  for (const auto& n : tree.nodes) {
    auto it = tree.parent.find(n);
    if (it == tree.parent.end()) continue;
    parent[n] = it->second;
    Json e = {{"parent", it->second}};
    if (auto a = tree.edges.find(n); a != tree.edges.end()) {
      Json groups = Json::object();
      for (const auto& [gid, kind] : a->second.kind_per_group) groups[gid] = to_string(kind);
      e["total_complexity"] = a->second.total_complexity;
      e["forced"] = a->second.forced;
      e["groups"] = std::move(groups);
      e["diff"] = semantic_diff_to_json(a->second.diff);
    }
    edges[n] = std::move(e);
  }
  return Json{{"root", tree.root},
              {"nodes", tree.nodes},
              {"parent", std::move(parent)},
              {"edges", std::move(edges)}};
}

std::string tree_to_dot(const VersionTree& tree, const std::vector<ImageServiceRecord>& versions) {
  std::map<std::string, const ImageServiceRecord*> by_id;
  for (const auto& v : versions) by_id[v.id] = &v;

  std::ostringstream out;
  out << "digraph version_tree {\n";
  out << "  node [shape=box];\n";
  for (const auto& n : tree.nodes) {
    std::string label = escape(n);
    if (auto it = by_id.find(n); it != by_id.end()) label += "\\n" + format_utc(it->second->upload_time);
    out << "  " << dot_id(n) << " [label=\"" << label << "\"";
    if (n == tree.root) out << ", peripheries=2";
    out << "];\n";
  }
  for (const auto& n : tree.nodes) {
    auto it = tree.parent.find(n);
    if (it == tree.parent.end()) continue;
    out << "  " << dot_id(it->second) << " -> " << dot_id(n);
    if (auto a = tree.edges.find(n); a != tree.edges.end()) {
      const EdgeAnnotation& e = a->second;
      out << " [label=\"c=" << fixed(e.total_complexity, 4)
          << "\\nds=" << fixed(e.diff.delta_spatial_km, 1) << "km dt=" << fixed(e.diff.delta_temporal_s, 0)
          << "s dc=" << fixed(e.diff.delta_context, 3) << "\"";
      if (e.forced) out << ", style=dashed";
      out << "]";
    }
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace provtree
