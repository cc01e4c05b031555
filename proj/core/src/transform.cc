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

#include "provtree/transform.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace provtree {
namespace {

void require_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 1) {
    throw DimensionError("vector lengths differ or are empty: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
  }
}

TransformFit infeasible(TransformKind kind, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  TransformFit f;
  f.kind = kind;
  f.delta = Eigen::MatrixXd::Identity(a.size(), a.size());
  f.residual = (a - b).norm();
  f.complexity = kInfeasible;
  return f;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string_view to_string(TransformKind k) {
  return k == TransformKind::kLinear ? "linear" : "quadratic";
}

std::string_view to_string(GroupFitKind k) {
  switch (k) {
    case GroupFitKind::kLinear:
      return "linear";
    case GroupFitKind::kQuadratic:
      return "quadratic";
    case GroupFitKind::kMissing:
      return "missing";
    case GroupFitKind::kInfeasible:
      return "infeasible";
  }
  return "missing";
}

TransformFit fit_linear(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  require_same_length(a, b);
  const Eigen::Index d = a.size();
  const double na = a.norm();
  if (na < kDegeneracyThreshold) {
    // A zero source maps only to (near) zero; that case is the identity.
    if ((b - a).norm() < kDegeneracyThreshold) {
      TransformFit f;
      f.delta = Eigen::MatrixXd::Identity(d, d);
      f.residual = (a - b).norm();
      return f;
    }
    return infeasible(TransformKind::kLinear, a, b);
  }
  TransformFit f;
  f.kind = TransformKind::kLinear;
  f.delta = Eigen::MatrixXd::Identity(d, d) + (b - a) * a.transpose() / a.squaredNorm();
  f.residual = (f.delta * a - b).norm();
  f.complexity = frobenius_distance(f.delta, Eigen::MatrixXd::Identity(d, d));
  return f;
}

TransformFit fit_quadratic(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  require_same_length(a, b);
  const Eigen::Index d = a.size();
  const double qa = a.squaredNorm();
  if (std::sqrt(qa) < kDegeneracyThreshold) {
    if ((b - a).norm() < kDegeneracyThreshold) {
      TransformFit f;
      f.kind = TransformKind::kQuadratic;
      f.delta = Eigen::MatrixXd::Identity(d, d);
      f.residual = (a - b).norm();
      return f;
    }
    return infeasible(TransformKind::kQuadratic, a, b);
  }
  const double c = b.squaredNorm() / qa;
  TransformFit f;
  f.kind = TransformKind::kQuadratic;
  f.delta = c * Eigen::MatrixXd::Identity(d, d);
  f.residual = std::abs(a.dot(f.delta * a) - b.squaredNorm());
  f.complexity = std::abs(c - 1.0) * std::sqrt(static_cast<double>(d));
  return f;
}

TransformFit choose_transform(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              FitCounter* counter) {
  if (counter) ++counter->fits;
  TransformFit lin = fit_linear(a, b);
  TransformFit quad = fit_quadratic(a, b);
  if (!lin.feasible() && !quad.feasible()) return lin;
  return quad.complexity < lin.complexity ? quad : lin;
}

double frobenius_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("matrix shapes differ");
  }
  // trace(M M^T) is the sum of squared entries of M.
  return std::sqrt((a - b).squaredNorm());
}

std::map<std::string, GroupFitKind> PairTransforms::kinds() const {
  std::map<std::string, GroupFitKind> out;
  for (const auto& [gid, fit] : fits) {
    if (!fit.feasible()) {
      out[gid] = GroupFitKind::kInfeasible;
    } else {
      out[gid] = fit.kind == TransformKind::kLinear ? GroupFitKind::kLinear
                                                    : GroupFitKind::kQuadratic;
    }
  }
  for (const auto& gid : missing_groups) out[gid] = GroupFitKind::kMissing;
  return out;
}

PairTransforms pair_transforms_lenient(const Cluster& a, const Cluster& b,
                                       const TransformOptions& options, FitCounter* counter) {
  PairTransforms p;
  p.from_version = a.version_id;
  p.to_version = b.version_id;
  std::set<std::string> all;
  for (const auto& [gid, _] : a.points) all.insert(gid);
  for (const auto& [gid, _] : b.points) all.insert(gid);
  for (const auto& gid : all) {
    auto ia = a.points.find(gid);
    auto ib = b.points.find(gid);
    if (ia == a.points.end() || ib == b.points.end()) {
      p.missing_groups.push_back(gid);
      p.total_complexity += options.missing_group_penalty;
      continue;
    }
    TransformFit fit = choose_transform(ia->second.values, ib->second.values, counter);
    p.total_complexity += fit.feasible() ? fit.complexity : options.missing_group_penalty;
    p.fits.emplace(gid, std::move(fit));
  }
  return p;
}

PairTransforms pair_transforms(const Cluster& a, const Cluster& b, const TransformOptions& options,
                               FitCounter* counter) {
  const bool shared = std::any_of(a.points.begin(), a.points.end(),
                                  [&](const auto& kv) { return b.points.contains(kv.first); });
  if (!shared) {
    throw NoOverlapError("versions " + a.version_id + " and " + b.version_id +
                         " share no attribute group");
  }
  return pair_transforms_lenient(a, b, options, counter);
}

std::vector<RankedFit> nearest_neighbors(const TransformFit& target,
                                         const std::vector<TransformFit>& pool, std::size_t k) {
  std::vector<RankedFit> ranked;
  ranked.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    ranked.push_back({i, frobenius_distance(target.delta, pool[i].delta)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedFit& x, const RankedFit& y) { return x.distance < y.distance; });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

TransformFit identity_fit(Eigen::Index d) {
  TransformFit f;
  f.delta = Eigen::MatrixXd::Identity(d, d);
  return f;
}

Json pair_transforms_to_json(const PairTransforms& p, bool include_matrices) {
  Json groups = Json::object();
  for (const auto& [gid, kind] : p.kinds()) {
    Json g = {{"kind", std::string(to_string(kind))}};
    if (auto it = p.fits.find(gid); it != p.fits.end()) {
      const auto& fit = it->second;
      if (fit.feasible()) {
        g["complexity"] = fit.complexity;
      } else {
        g["complexity"] = nullptr;
      }
      g["residual"] = fit.residual;
      if (include_matrices) g["delta"] = matrix_to_json(fit.delta);
    }
    groups[gid] = std::move(g);
  }
  return Json{{"from", p.from_version},
              {"to", p.to_version},
              {"total_complexity", p.total_complexity},
              {"groups", std::move(groups)}};
}

}  // namespace provtree
