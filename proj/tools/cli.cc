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

#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "config.h"
#include "provtree/consistency.h"
#include "provtree/embedding.h"
#include "provtree/environment.h"
#include "provtree/evalgen.h"
#include "provtree/ingest.h"
#include "provtree/sidecar.h"
#include "provtree/transform.h"
#include "provtree/versiontree.h"

namespace provtree::cli {
namespace {

// Input problem reported with exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::string format;
  std::optional<uint64_t> seed;
};

CliConfig effective_config(const Globals& g) {
  CliConfig c = g.config_path.empty() ? CliConfig{} : load_config(g.config_path);
  if (!g.format.empty()) {
    auto f = parse_output_format(g.format);
    if (!f) throw ConfigError("--format must be dot, document or csv");
    c.format = *f;
  }
  if (g.seed) c.seed = *g.seed;
  return c;
}

Corpus read_corpus(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw InputError("corpus file not found: '" + path + "'");
  }
  return load_corpus(path);
}

std::vector<std::string> ids_of(const std::vector<ImageServiceRecord>& records) {
  std::vector<std::string> ids;
  for (const auto& r : records) ids.push_back(r.id);
  return ids;
}

std::vector<GroupSchema> schemas_for(const CliConfig& c) {
  if (!c.group_schemas.empty()) return load_group_schemas(c.group_schemas);
  const auto shipped = data_dir() / "group_schemas.json";
  if (std::filesystem::exists(shipped)) return load_group_schemas(shipped);
  return default_group_schemas();
}

ImageServiceRecord seed_record_for(const CliConfig& c) {
  return parse_record(read_file(resolve_data(c.seed_record, "seed_record.json")));
}

void emit(std::ostream& out, const Json& doc) { out << doc.dump(2) << "\n"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << content;
  if (!f) throw InputError("failed writing '" + path + "'");
}

std::pair<std::size_t, std::size_t> parse_node_range(const std::string& s) {
  try {
    const auto dots = s.find("..");
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const auto n = std::stoul(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {n, n};
    }
    const std::string lo = s.substr(0, dots);
    const std::string hi = s.substr(dots + 2);
    const auto a = std::stoul(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(s);
    const auto b = std::stoul(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw InputError("--nodes expects N or LO..HI, got '" + s + "'");
  }
}

int cmd_check(const CliConfig& cfg, const std::string& corpus_path,
              std::optional<double> fail_over, std::ostream& out) {
  if (cfg.format == OutputFormat::kDot) throw InputError("check has no dot output");
  const Corpus corpus = read_corpus(corpus_path);
  const CapabilityDb db = CapabilityDb::load(resolve_data(cfg.capabilities, "capabilities.json"));
  const FixtureEnvironmentProvider env =
      FixtureEnvironmentProvider::load(resolve_data(cfg.environment, "environment_fixtures.json"));
  const double threshold = fail_over.value_or(cfg.fail_over);

  std::vector<InconsistencyReport> reports;
  std::vector<std::string> failing;
  for (const auto& r : corpus.versions) {
    reports.push_back(evaluate_all(r, db, &env, cfg.tolerances));
    const auto& agg = reports.back().aggregate;
    if (agg && *agg > threshold) failing.push_back(r.id);
  }

  if (cfg.format == OutputFormat::kCsv) {
    out << "record_id,group,status,score\n";
    for (const auto& rep : reports) {
      for (const auto& f : rep.findings) {
        out << csv_field(rep.record_id) << ',' << to_string(f.group) << ',' << to_string(f.status)
            << ',' << (f.score ? fixed(*f.score, 4) : "") << "\n";
      }
    }
  } else {
    Json arr = Json::array();
    for (const auto& rep : reports) arr.push_back(report_to_json(rep));
    emit(out, Json{{"fail_over", threshold}, {"failing", failing}, {"reports", std::move(arr)}});
  }
  return failing.empty() ? kExitOk : kExitInconsistent;
}

int cmd_tree(const CliConfig& cfg, const std::string& corpus_path, const std::string& strategy_name,
             std::ostream& out) {
  const auto strategy = parse_strategy(strategy_name);
  if (!strategy) throw InputError("--strategy must be baseline, heuristic or bruteforce");
  const Corpus corpus = read_corpus(corpus_path);
  if (corpus.versions.empty()) throw InputError("corpus has no versions");
  const auto versions = sort_by_upload(corpus.versions);
  const VersionTree tree =
      build_tree(*strategy, versions, schemas_for(cfg), cfg.tree_options());

  switch (cfg.format) {
    case OutputFormat::kDot:
      out << tree_to_dot(tree, versions);
      break;
    case OutputFormat::kCsv:
      out << "child,parent,total_complexity,forced,delta_spatial_km,delta_temporal_s,"
             "delta_context\n";
      for (const auto& n : tree.nodes) {
        auto it = tree.parent.find(n);
        if (it == tree.parent.end()) continue;
        const EdgeAnnotation& e = tree.edges.at(n);
        out << csv_field(n) << ',' << csv_field(it->second) << ',' << fixed(e.total_complexity)
            << ',' << (e.forced ? "true" : "false") << ',' << fixed(e.diff.delta_spatial_km, 3)
            << ',' << fixed(e.diff.delta_temporal_s, 0) << ',' << fixed(e.diff.delta_context)
            << "\n";
      }
      break;
    case OutputFormat::kDocument: {
      Json doc = {{"strategy", std::string(to_string(*strategy))}};
      const Json body = tree_to_json(tree);
      for (const auto& [k, v] : body.items()) doc[k] = v;
      if (corpus.ground_truth_tree) {
        doc["accuracy"] = tree_accuracy(tree, tree_from_parent_map(ids_of(versions),
                                                                   *corpus.ground_truth_tree));
      }
      emit(out, doc);
      break;
    }
  }
  return kExitOk;
}

int cmd_diff(const CliConfig& cfg, const std::string& corpus_path, const std::string& id_a,
             const std::string& id_b, bool matrices, std::ostream& out) {
  const Corpus corpus = read_corpus(corpus_path);
  const auto versions = sort_by_upload(corpus.versions);
  auto find = [&](const std::string& id) -> std::size_t {
    for (std::size_t i = 0; i < versions.size(); ++i) {
      if (versions[i].id == id) return i;
    }
    throw InputError("unknown version id '" + id + "'");
  };
  const std::size_t a = find(id_a);
  const std::size_t b = find(id_b);
  const auto clusters = build_clusters(versions, schemas_for(cfg), {cfg.text_dims});
  TransformOptions topt;
  topt.missing_group_penalty = cfg.missing_group_penalty;
  const PairTransforms pt = pair_transforms_lenient(clusters[a], clusters[b], topt);
  const SemanticDiff d = semantic_diff(versions[a], versions[b], cfg.text_dims);
  emit(out, Json{{"from", id_a},
                 {"to", id_b},
                 {"diff", semantic_diff_to_json(d)},
                 {"transforms", pair_transforms_to_json(pt, matrices)}});
  return kExitOk;
}

int cmd_generate(const CliConfig& cfg, const std::string& spec_path, std::size_t nodes,
                 std::size_t ops, const std::string& out_path, std::ostream& out) {
  const ImageServiceRecord seed = seed_record_for(cfg);
  CorpusSpec spec;
  if (!spec_path.empty()) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(spec_path, ec)) {
      throw InputError("spec file not found: '" + spec_path + "'");
    }
    spec = spec_from_json(parse_document(read_file(spec_path)), &seed);
  } else {
    if (nodes < 1) throw InputError("generate needs --spec or --nodes >= 1");
    spec = random_spec(nodes, ops, cfg.seed, seed);
  }
  const std::string text = generated_corpus_to_json(generate_corpus(spec)).dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

int cmd_evaluate(const CliConfig& cfg, std::size_t instances, const std::string& nodes,
                 bool no_bruteforce, bool timings, const std::string& out_path,
                 const std::string& csv_path, std::ostream& out) {
  ExperimentConfig ec;
  ec.instances = instances;
  std::tie(ec.min_nodes, ec.max_nodes) = parse_node_range(nodes);
  if (ec.min_nodes < 1 || ec.max_nodes < ec.min_nodes) {
    throw InputError("--nodes range must satisfy 1 <= LO <= HI");
  }
  ec.seed = cfg.seed;
  ec.bruteforce = !no_bruteforce;
  ec.tree = cfg.tree_options();
  ec.sampler = cfg.sampler;
  if (ec.bruteforce && ec.max_nodes > ec.tree.n_max) {
    throw SizeGuardError("brute force is limited to " + std::to_string(ec.tree.n_max) +
                         " versions; lower --nodes or pass --no-bruteforce");
  }
  const EvalResult result = run_experiment(ec, seed_record_for(cfg), schemas_for(cfg));

  Json doc = {{"seed", ec.seed},
              {"nodes", {{"min", ec.min_nodes}, {"max", ec.max_nodes}}}};
  const Json body = eval_result_to_json(result, timings);
  for (const auto& [k, v] : body.items()) doc[k] = v;
  const std::string text = cfg.format == OutputFormat::kCsv ? eval_rows_to_csv(result, timings)
                                                             : doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  if (!csv_path.empty()) write_file(csv_path, eval_rows_to_csv(result, timings));
  return kExitOk;
}

int cmd_embed(const CliConfig& cfg, const std::string& corpus_path, bool dump, bool schemas,
              std::ostream& out) {
  if (schemas) {
    emit(out, group_schemas_to_json(schemas_for(cfg)));
    return kExitOk;
  }
  if (!dump) throw InputError("embed needs --dump or --schemas");
  if (corpus_path.empty()) throw InputError("embed --dump needs a corpus path");
  const Corpus corpus = read_corpus(corpus_path);
  const auto versions = sort_by_upload(corpus.versions);
  emit(out, Json{{"clusters", clusters_to_json(build_clusters(versions, schemas_for(cfg),
                                                               {cfg.text_dims}))}});
  return kExitOk;
}

void report_violations(const ValidationError& e, std::ostream& err) {
  err << "error: invalid input\n";
  for (const auto& v : e.violations()) {
    err << "  " << (v.record_id.empty() ? "<corpus>" : v.record_id) << ": " << v.field_path
        << ": " << v.message << "\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"metadata consistency checks and version-tree reconstruction", "provtree"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Config file (JSON)");
  app.add_option("--format", g.format, "Output format: dot, document or csv");
  app.add_option("--seed", g.seed, "Random seed");

  std::string corpus;
  std::optional<double> fail_over;
  auto* check = app.add_subcommand("check", "Run the consistency rules on every record");
  check->add_option("corpus", corpus, "Corpus document")->required();
  check->add_option("--fail-over", fail_over, "Aggregate score above which a record fails");

  std::string strategy = "heuristic";
  auto* tree = app.add_subcommand("tree", "Reconstruct the version tree");
  tree->add_option("corpus", corpus, "Corpus document")->required();
  tree->add_option("--strategy", strategy, "baseline, heuristic or bruteforce");

  std::string id_a;
  std::string id_b;
  bool matrices = false;
  auto* diff = app.add_subcommand("diff", "Semantic diff and transforms between two versions");
  diff->add_option("corpus", corpus, "Corpus document")->required();
  diff->add_option("id_a", id_a, "From version")->required();
  diff->add_option("id_b", id_b, "To version")->required();
  diff->add_flag("--matrices", matrices, "Include transformation matrices");

  std::string spec_path;
  std::size_t gen_nodes = 0;
  std::size_t gen_ops = 1;
  std::string out_path;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic corpus");
  generate->add_option("--spec", spec_path, "Corpus spec document");
  generate->add_option("--nodes", gen_nodes, "Random tree size when no spec is given");
  generate->add_option("--ops", gen_ops, "Operators per edge for a random spec");
  generate->add_option("--out", out_path, "Output file (default stdout)");

  std::size_t instances = 200;
  std::string nodes = "5..8";
  bool no_bruteforce = false;
  bool timings = false;
  std::string csv_path;
  auto* evaluate = app.add_subcommand("evaluate", "Compare the tree builders on generated corpora");
  evaluate->add_option("--instances", instances, "Number of generated instances");
  evaluate->add_option("--nodes", nodes, "Versions per instance, N or LO..HI");
  evaluate->add_option("--out", out_path, "Report file (default stdout)");
  evaluate->add_option("--csv", csv_path, "Also write per-instance rows as CSV");
  evaluate->add_flag("--timings", timings, "Include wall-clock times (not reproducible)");
  evaluate->add_flag("--no-bruteforce", no_bruteforce, "Skip the exhaustive builder");

  bool dump = false;
  bool schemas = false;
  auto* embed = app.add_subcommand("embed", "Show the normalized attribute embedding");
  embed->add_option("corpus", corpus, "Corpus document");
  embed->add_flag("--dump", dump, "Print every version's cluster");
  embed->add_flag("--schemas", schemas, "Print the attribute group table");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  try {
    const CliConfig cfg = effective_config(g);
    if (check->parsed()) return cmd_check(cfg, corpus, fail_over, out);
    if (tree->parsed()) return cmd_tree(cfg, corpus, strategy, out);
    if (diff->parsed()) return cmd_diff(cfg, corpus, id_a, id_b, matrices, out);
    if (generate->parsed()) return cmd_generate(cfg, spec_path, gen_nodes, gen_ops, out_path, out);
    if (evaluate->parsed()) {
      return cmd_evaluate(cfg, instances, nodes, no_bruteforce, timings, out_path, csv_path, out);
    }
    if (embed->parsed()) return cmd_embed(cfg, corpus, dump, schemas, out);
  } catch (const SizeGuardError& e) {
    err << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const ParseError& e) {
    err << "error: parse failure at byte " << e.byte_offset() << ": " << e.what() << "\n";
    return kExitInputError;
  } catch (const ValidationError& e) {
    report_violations(e, err);
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace provtree::cli
