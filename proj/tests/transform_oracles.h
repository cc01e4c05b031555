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

// Independent reference computations for transform fits, shared by the unit
// tests and the acceptance binary.

#ifndef PROVTREE_TESTS_TRANSFORM_ORACLES_H_
#define PROVTREE_TESTS_TRANSFORM_ORACLES_H_

#include <cmath>

#include <Eigen/Dense>

namespace provtree::testing {

// Minimum-Frobenius-change matrix with delta * a = b, solved as a general
// underdetermined system in vec(delta - I): (a^T kron I) x = b - a.
inline Eigen::MatrixXd linear_fit_oracle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index d = a.size();
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(d, d * d);
  for (Eigen::Index col = 0; col < d; ++col) {
    for (Eigen::Index row = 0; row < d; ++row) system(row, col * d + row) = a[col];
  }
  const Eigen::VectorXd x = system.completeOrthogonalDecomposition().solve(b - a);
  return Eigen::MatrixXd::Identity(d, d) + Eigen::Map<const Eigen::MatrixXd>(x.data(), d, d);
}

// sqrt(trace((A - B)(A - B)^T)), written out literally.
inline double frobenius_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd m = a - b;
  return std::sqrt((m * m.transpose()).trace());
}

// Random matrix n with n * a = 0: any matrix times the projector off a.
inline Eigen::MatrixXd null_space_perturbation(const Eigen::MatrixXd& m, const Eigen::VectorXd& a) {
  const Eigen::Index d = a.size();
  const Eigen::MatrixXd proj =
      Eigen::MatrixXd::Identity(d, d) - a * a.transpose() / a.squaredNorm();
  return m * proj;
}

}  // namespace provtree::testing

#endif  // PROVTREE_TESTS_TRANSFORM_ORACLES_H_
