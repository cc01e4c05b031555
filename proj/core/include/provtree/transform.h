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

// Transformation matrices between attribute vectors.
//
// A linear fit finds the matrix closest to the identity (in Frobenius norm)
// that maps a onto b. A quadratic fit relates the two vectors through their
// quadratic forms, with a scaled identity. Complexity is the Frobenius
// distance from the identity; lower means a more plausible direct edit.

#ifndef PROVTREE_TRANSFORM_H_
#define PROVTREE_TRANSFORM_H_

#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "provtree/embedding.h"
#include "provtree/sidecar.h"

namespace provtree {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoOverlapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDegeneracyThreshold = 1e-9;
inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

enum class TransformKind { kLinear, kQuadratic };
std::string_view to_string(TransformKind k);

struct TransformFit {
  TransformKind kind = TransformKind::kLinear;
  Eigen::MatrixXd delta;
  double residual = 0.0;
  double complexity = 0.0;  // kInfeasible when no fit exists

  bool feasible() const { return complexity != kInfeasible; }
};

// Counts choose_transform invocations; the hardware-independent cost measure.
struct FitCounter {
  std::size_t fits = 0;
};

TransformFit fit_linear(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
TransformFit fit_quadratic(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
// Lower complexity wins; ties go to linear.
TransformFit choose_transform(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              FitCounter* counter = nullptr);

// sqrt(trace((A - B)(A - B)^T)).
double frobenius_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct TransformOptions {
  double missing_group_penalty = 1.0;
};

enum class GroupFitKind { kLinear, kQuadratic, kMissing, kInfeasible };
std::string_view to_string(GroupFitKind k);

struct PairTransforms {
  std::string from_version;
  std::string to_version;
  std::map<std::string, TransformFit> fits;  // shared groups only
  std::vector<std::string> missing_groups;   // present in exactly one cluster
  double total_complexity = 0.0;

  std::map<std::string, GroupFitKind> kinds() const;
};

// Throws NoOverlapError when the clusters share no group. An infeasible group
// fit is charged the missing-group penalty so the total stays finite.
PairTransforms pair_transforms(const Cluster& a, const Cluster& b,
                               const TransformOptions& options = {},
                               FitCounter* counter = nullptr);

// Same, but a pair with no shared group is charged one penalty per group
// present in either cluster instead of throwing.
PairTransforms pair_transforms_lenient(const Cluster& a, const Cluster& b,
                                       const TransformOptions& options = {},
                                       FitCounter* counter = nullptr);

struct RankedFit {
  std::size_t index = 0;  // into the pool
  double distance = 0.0;
};

// Pool sorted by Frobenius distance to target.delta, stable, first k.
std::vector<RankedFit> nearest_neighbors(const TransformFit& target,
                                         const std::vector<TransformFit>& pool, std::size_t k);

// Identity fit of dimension d, the reference for nearest-neighbor ranking.
TransformFit identity_fit(Eigen::Index d);

Json pair_transforms_to_json(const PairTransforms& p, bool include_matrices);

}  // namespace provtree

#endif  // PROVTREE_TRANSFORM_H_
