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

// Builder wall time by corpus size. fit_count is reported as a counter since
// it is the machine-independent cost.

#include <benchmark/benchmark.h>

#include "provtree/embedding.h"
#include "provtree/evalgen.h"
#include "provtree/random.h"
#include "provtree/sidecar.h"
#include "provtree/versiontree.h"

#ifndef PROVTREE_BENCH_SEED_RECORD
#define PROVTREE_BENCH_SEED_RECORD "data/seed_record.json"
#endif

namespace provtree {
namespace {

const ImageServiceRecord& seed() {
  static const ImageServiceRecord r = parse_record(read_file(PROVTREE_BENCH_SEED_RECORD));
  return r;
}

void run_builder(benchmark::State& state, Strategy strategy) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(n);
  const GeneratedCorpus corpus =
      generate_corpus(sample_experiment_spec(n, rng, SamplerParams{}, seed()));
  const auto schemas = default_group_schemas();
  BuildStats stats;
  for (auto _ : state) {
    stats = {};
    benchmark::DoNotOptimize(build_tree(strategy, corpus.versions, schemas, {}, &stats));
  }
  state.counters["fit_count"] = static_cast<double>(stats.fit_count);
}

void BM_Baseline(benchmark::State& s) { run_builder(s, Strategy::kBaseline); }
void BM_Heuristic(benchmark::State& s) { run_builder(s, Strategy::kHeuristic); }
void BM_Bruteforce(benchmark::State& s) { run_builder(s, Strategy::kBruteforce); }
BENCHMARK(BM_Baseline)->DenseRange(5, 8);
BENCHMARK(BM_Heuristic)->DenseRange(5, 8);
BENCHMARK(BM_Bruteforce)->DenseRange(5, 8)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace provtree

BENCHMARK_MAIN();
