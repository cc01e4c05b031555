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

#include <chrono>
#include <cstdio>
#include <sstream>

#include "provtree/evalgen.h"

namespace provtree {
namespace {

std::vector<Strategy> strategies_for(const ExperimentConfig& config) {
  std::vector<Strategy> s = {Strategy::kBaseline, Strategy::kHeuristic};
  if (config.bruteforce) s.push_back(Strategy::kBruteforce);
  return s;
}

InstanceRow run_instance(const ExperimentConfig& config, std::size_t index,
                         const ImageServiceRecord& seed_record,
                         const std::vector<GroupSchema>& schemas) {
  InstanceRow row;
  row.index = index;
  row.seed = Rng::derive(config.seed, index);
  Rng rng(row.seed);
  row.n_nodes = config.min_nodes + rng.below(config.max_nodes - config.min_nodes + 1);
  try {
    const CorpusSpec spec = sample_experiment_spec(row.n_nodes, rng, config.sampler, seed_record);
    const GeneratedCorpus corpus = generate_corpus(spec);
    for (Strategy s : strategies_for(config)) {
      BuildStats stats;
      const auto start = std::chrono::steady_clock::now();
      const VersionTree tree = build_tree(s, corpus.versions, schemas, config.tree, &stats);
      const auto stop = std::chrono::steady_clock::now();
      StrategyOutcome& o = row.outcomes[s];
      o.accuracy = tree_accuracy(tree, corpus.truth);
      o.fit_count = stats.fit_count;
      o.total_weight = tree.total_weight();
      o.wall_time_ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
    }
  } catch (const std::exception& e) {
    row.outcomes.clear();
    row.error = e.what();
  }
  return row;
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

EvalResult run_experiment(const ExperimentConfig& config, const ImageServiceRecord& seed_record,
                          const std::vector<GroupSchema>& schemas) {
  if (config.min_nodes < 1 || config.max_nodes < config.min_nodes) {
    throw std::invalid_argument("node range must satisfy 1 <= min <= max");
  }
  if (config.bruteforce && config.max_nodes > config.tree.n_max) {
    throw std::invalid_argument("node range exceeds the brute-force limit of " +
                                std::to_string(config.tree.n_max));
  }
  EvalResult result;
  result.instances = config.instances;
  for (std::size_t i = 0; i < config.instances; ++i) {
    result.rows.push_back(run_instance(config, i, seed_record, schemas));
  }

  std::size_t ok = 0;
  for (const auto& row : result.rows) {
    if (!row.error.empty()) {
      ++result.failures;
      continue;
    }
    ++ok;
    for (const auto& [s, o] : row.outcomes) {
      StrategySummary& sum = result.strategies[s];
      sum.accuracy_mean += o.accuracy;
      sum.fit_count_total += o.fit_count;
      sum.wall_time_ns_total += o.wall_time_ns;
    }
  }
  for (Strategy s : strategies_for(config)) {
    StrategySummary& sum = result.strategies[s];
    if (ok > 0) {
      sum.accuracy_mean /= static_cast<double>(ok);
      sum.fit_count_mean = static_cast<double>(sum.fit_count_total) / static_cast<double>(ok);
    }
  }
  return result;
}

Json eval_result_to_json(const EvalResult& r, bool include_timings) {
  Json strategies = Json::object();
  for (const auto& [s, sum] : r.strategies) {
    Json j = {{"accuracy_mean", sum.accuracy_mean},
              {"fit_count_total", sum.fit_count_total},
              {"fit_count_mean", sum.fit_count_mean}};
    if (include_timings) j["wall_time_ns_total"] = sum.wall_time_ns_total;
    strategies[std::string(to_string(s))] = std::move(j);
  }
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j = {{"index", row.index}, {"n_nodes", row.n_nodes}, {"seed", row.seed}};
    if (!row.error.empty()) {
      j["error"] = row.error;
    } else {
      Json outcomes = Json::object();
      for (const auto& [s, o] : row.outcomes) {
        Json oj = {{"accuracy", o.accuracy},
                   {"fit_count", o.fit_count},
                   {"total_weight", o.total_weight}};
        if (include_timings) oj["wall_time_ns"] = o.wall_time_ns;
        outcomes[std::string(to_string(s))] = std::move(oj);
      }
      j["outcomes"] = std::move(outcomes);
    }
    rows.push_back(std::move(j));
  }
  return Json{{"instances", r.instances},
              {"failures", r.failures},
              {"strategies", std::move(strategies)},
              {"rows", std::move(rows)}};
}

std::string eval_rows_to_csv(const EvalResult& r, bool include_timings) {
  std::ostringstream out;
  out << "index,n_nodes,seed,strategy,accuracy,fit_count,total_weight";
  if (include_timings) out << ",wall_time_ns";
  out << ",error\n";
  for (const auto& row : r.rows) {
    if (!row.error.empty()) {
      out << row.index << ',' << row.n_nodes << ',' << row.seed << ",,,,";
      if (include_timings) out << ',';
      std::string e = row.error;
      for (char& c : e) {
        if (c == ',' || c == '\n' || c == '"') c = ' ';
      }
      out << ',' << e << '\n';
      continue;
    }
    for (const auto& [s, o] : row.outcomes) {
      out << row.index << ',' << row.n_nodes << ',' << row.seed << ',' << to_string(s) << ','
          << fixed(o.accuracy) << ',' << o.fit_count << ',' << fixed(o.total_weight);
      if (include_timings) out << ',' << o.wall_time_ns;
      out << ",\n";
    }
  }
  return out.str();
}

}  // namespace provtree
