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

// Shared fixtures and hand-rolled generators for the test suites.

#ifndef PROVTREE_TESTS_TEST_SUPPORT_H_
#define PROVTREE_TESTS_TEST_SUPPORT_H_

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "provtree/consistency.h"
#include "provtree/environment.h"
#include "provtree/evalgen.h"
#include "provtree/random.h"
#include "provtree/sidecar.h"

namespace provtree::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(PROVTREE_TEST_DATA_DIR) / name;
}

inline std::filesystem::path testdata_path(const std::string& name) {
  return std::filesystem::path(PROVTREE_TESTDATA_DIR) / name;
}

inline std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(PROVTREE_GOLDEN_DIR) / name;
}

inline const ImageServiceRecord& seed_record() {
  static const ImageServiceRecord r = parse_record(read_file(data_path("seed_record.json")));
  return r;
}

inline const CapabilityDb& capability_db() {
  static const CapabilityDb db = CapabilityDb::load(data_path("capabilities.json"));
  return db;
}

inline const FixtureEnvironmentProvider& environment_fixtures() {
  static const FixtureEnvironmentProvider env =
      FixtureEnvironmentProvider::load(data_path("environment_fixtures.json"));
  return env;
}

// Entries uniform in [lo, hi).
inline Eigen::VectorXd random_vector(Rng& rng, Eigen::Index d, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(-5.0, 5.0);
  return m;
}

// Corpus with every version a copy of the seed, uploaded an hour apart.
inline std::vector<ImageServiceRecord> identical_corpus(std::size_t n) {
  std::vector<ImageServiceRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    ImageServiceRecord r = seed_record();
    r.id = "v" + std::to_string(i + 1);
    r.upload_time = seed_record().upload_time + std::chrono::hours(static_cast<int>(i));
    out.push_back(std::move(r));
  }
  return out;
}

// Small random corpus from the experiment sampler.
inline GeneratedCorpus fuzzed_corpus(uint64_t seed, std::size_t n) {
  Rng rng(seed);
  return generate_corpus(sample_experiment_spec(n, rng, SamplerParams{}, seed_record()));
}

}  // namespace provtree::testing

#endif  // PROVTREE_TESTS_TEST_SUPPORT_H_
