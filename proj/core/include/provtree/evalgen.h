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

// Synthetic version corpora with known ground truth, and the evaluation
// harness comparing the three tree builders on them.
//
// A corpus is planned as a rooted tree over N nodes. The root is the seed
// record; every child is its parent with a short list of mutation operators
// applied. Nodes are then uploaded in a given order, which need not follow
// the tree.

#ifndef PROVTREE_EVALGEN_H_
#define PROVTREE_EVALGEN_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "provtree/consistency.h"
#include "provtree/model.h"
#include "provtree/random.h"
#include "provtree/sidecar.h"
#include "provtree/versiontree.h"

namespace provtree {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MutationKind {
  kShiftDatetime,          // magnitude: seconds added to datetime_original
  kMoveGps,                // magnitude: degrees of longitude moved (latitude moves a quarter)
  kRewriteContext,         // magnitude: index into the story catalog
  kSwapCameraModel,        // magnitude: index into the replacement camera catalog
  kPerturbExposure,        // magnitude: stops of shorter exposure, EV kept in step
  kDesyncShutterExposure,  // magnitude: stops of longer exposure, EV and shutter untouched
  kChangeTimezone,         // magnitude: hours added to timezone_offset
};

inline constexpr std::array<MutationKind, 7> kAllMutationKinds = {
    MutationKind::kShiftDatetime,    MutationKind::kMoveGps,
    MutationKind::kRewriteContext,   MutationKind::kSwapCameraModel,
    MutationKind::kPerturbExposure,  MutationKind::kDesyncShutterExposure,
    MutationKind::kChangeTimezone,
};

std::string_view to_string(MutationKind k);
std::optional<MutationKind> parse_mutation_kind(std::string_view s);

// Valid magnitudes: |m| in [min_abs, max_abs]; negative values only when
// `signed_values`. Catalog indices are whole numbers.
struct MagnitudeBounds {
  double min_abs = 0.0;
  double max_abs = 0.0;
  bool signed_values = false;
  bool integral = false;
};
MagnitudeBounds mutation_bounds(MutationKind k);
bool in_bounds(MutationKind k, double magnitude);

// The rule group each operator is built to break on a consistent record.
RuleGroup designated_group(MutationKind k);

struct MutationOp {
  MutationKind kind = MutationKind::kShiftDatetime;
  double magnitude = 0.0;

  bool operator==(const MutationOp&) const = default;
};

// Applies one operator in place. Throws GenerationError when a field it
// needs is absent, or std::invalid_argument for an out-of-bounds magnitude.
void apply_mutation(ImageServiceRecord& record, const MutationOp& op);

// Cameras swap_camera_model can switch to, as (make, model).
const std::vector<std::pair<std::string, std::string>>& replacement_cameras();

struct CorpusSpec {
  ImageServiceRecord seed_record;
  std::vector<int> tree_shape;                          // parent per node, -1 for the root
  std::map<int, std::vector<MutationOp>> ops_per_edge;  // keyed by child node
  uint64_t rng_seed = 0;
  std::vector<int> upload_order;  // upload_order[k] is the node uploaded k-th
};

// Problems with the spec; empty when valid.
std::vector<std::string> check_spec(const CorpusSpec& spec);

struct GeneratedCorpus {
  std::vector<ImageServiceRecord> versions;  // upload order, ids "v1", "v2", ...
  VersionTree truth;
};

// Throws GenerationError naming the edge for an inapplicable operator, and
// std::invalid_argument for an invalid spec.
GeneratedCorpus generate_corpus(const CorpusSpec& spec);

// Uniform random rooted labeled tree, upload order and operators.
CorpusSpec random_spec(std::size_t n_nodes, std::size_t n_ops_per_edge, uint64_t rng_seed,
                       const ImageServiceRecord& seed_record);

MutationOp random_op(Rng& rng);
MutationOp random_op(Rng& rng, MutationKind kind);

// Prüfer codes over labels 0..n-1.
std::vector<int> random_pruefer(std::size_t n, Rng& rng);
std::vector<int> pruefer_to_parents(const std::vector<int>& code, std::size_t n, int root);
std::vector<int> parents_to_pruefer(const std::vector<int>& parents);

Json spec_to_json(const CorpusSpec& spec);
// `seed_record` may be omitted from the document when a default is given.
CorpusSpec spec_from_json(const Json& doc, const ImageServiceRecord* default_seed = nullptr);
Json generated_corpus_to_json(const GeneratedCorpus& corpus);

// Evaluation harness.

// Instance shape for experiments. Trees grow in creation order: each new node
// extends the newest node with probability chain_bias, else picks a uniformly
// random earlier node. Uploads follow creation order, then each adjacent pair
// is transposed with probability upload_swap.
struct SamplerParams {
  double chain_bias = 0.6;
  double upload_swap = 0.2;
  int min_ops = 1;
  int max_ops = 2;
};

CorpusSpec sample_experiment_spec(std::size_t n_nodes, Rng& rng, const SamplerParams& sampler,
                                  const ImageServiceRecord& seed_record);

struct ExperimentConfig {
  std::size_t instances = 200;
  std::size_t min_nodes = 5;
  std::size_t max_nodes = 8;
  uint64_t seed = 1;
  bool bruteforce = true;
  TreeOptions tree;
  SamplerParams sampler;
};

struct StrategyOutcome {
  double accuracy = 0.0;
  std::size_t fit_count = 0;
  double total_weight = 0.0;
  int64_t wall_time_ns = 0;
};

struct InstanceRow {
  std::size_t index = 0;
  std::size_t n_nodes = 0;
  uint64_t seed = 0;
  std::map<Strategy, StrategyOutcome> outcomes;
  std::string error;  // non-empty when the instance failed
};

struct StrategySummary {
  double accuracy_mean = 0.0;
  std::size_t fit_count_total = 0;
  double fit_count_mean = 0.0;
  int64_t wall_time_ns_total = 0;
};

struct EvalResult {
  std::size_t instances = 0;
  std::size_t failures = 0;
  std::map<Strategy, StrategySummary> strategies;
  std::vector<InstanceRow> rows;
};

EvalResult run_experiment(const ExperimentConfig& config, const ImageServiceRecord& seed_record,
                          const std::vector<GroupSchema>& schemas);

Json eval_result_to_json(const EvalResult& r, bool include_timings);
std::string eval_rows_to_csv(const EvalResult& r, bool include_timings);

}  // namespace provtree

#endif  // PROVTREE_EVALGEN_H_
