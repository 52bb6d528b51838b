// catsforge: build databases from raw tables, synthesize SQL/table
// example sets, transform them to token graphs, run the template
// describer, and score coverage/repetition/complexity stats.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "catsforge/dataset.hpp"
#include "catsforge/graph.hpp"
#include "catsforge/lne.hpp"
#include "catsforge/metrics.hpp"
#include "catsforge/rng.hpp"
#include "catsforge/sql_parser.hpp"
#include "catsforge/sql_synth.hpp"
#include "catsforge/strings.hpp"
#include "catsforge/table.hpp"
#include "catsforge/temp_gen.hpp"

namespace fs = std::filesystem;
using namespace catsforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRecordErrors = 1;
constexpr int kExitUsage = 2;

struct Config {
  double min_overlap = 0.5;
  int avg_decimals = 2;
  int max_depth = 2;
  int max_attempts_per_example = 400;
  std::optional<std::string> blacklist_path;
  std::optional<std::string> sensitive_path;
  std::optional<std::string> lexicon_path;
  std::optional<std::string> templates_path;
  std::map<std::string, double> rule_weights;
  std::map<Hardness, double> hardness_targets = {{Hardness::Easy, 0.145},
                                                 {Hardness::Medium, 0.400},
                                                 {Hardness::Hard, 0.385},
                                                 {Hardness::ExtraHard, 0.070}};
};

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  Config cfg;
  cfg.min_overlap = j.value("min_overlap", cfg.min_overlap);
  cfg.avg_decimals = j.value("avg_decimals", cfg.avg_decimals);
  cfg.max_depth = j.value("max_depth", cfg.max_depth);
  cfg.max_attempts_per_example =
      j.value("max_attempts_per_example", cfg.max_attempts_per_example);
  const auto base = fs::path(path).parent_path();
  const auto resolve = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key)) return std::nullopt;
    fs::path p = j.at(key).get<std::string>();
    if (p.is_relative()) p = base / p;
    return p.string();
  };
  cfg.blacklist_path = resolve("blacklist");
  cfg.sensitive_path = resolve("sensitive_patterns");
  cfg.lexicon_path = resolve("lexicon");
  cfg.templates_path = resolve("templates");
  if (j.contains("rule_weights")) {
    for (const auto& [key, value] : j.at("rule_weights").items()) {
      cfg.rule_weights[key] = value.get<double>();
    }
  }
  if (j.contains("hardness_targets")) {
    cfg.hardness_targets.clear();
    for (const auto& [key, value] : j.at("hardness_targets").items()) {
      const auto h = hardness_from_string(key);
      if (!h) throw std::runtime_error("unknown hardness level in config: " + key);
      cfg.hardness_targets[*h] = value.get<double>();
    }
  }
  return cfg;
}

Config resolve_config(const std::string& explicit_path) {
  if (!explicit_path.empty()) return load_config(explicit_path);
  if (const char* env = std::getenv("CATS_FORGE_CONFIG")) return load_config(env);
  return Config{};
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

// ---- build-db -------------------------------------------------------------

int cmd_build_db(const std::vector<std::string>& inputs, const std::string& output,
                 const std::string& report_path, const Config& cfg) {
  std::vector<DataTable> raws;
  const auto ingest_file = [&](const fs::path& p) {
    const std::string stem = p.stem().string();
    if (p.extension() == ".csv") {
      auto in = open_input(p.string());
      raws.push_back(table_from_csv(in, stem));
    } else if (p.extension() == ".json") {
      auto in = open_input(p.string());
      nlohmann::json j;
      in >> j;
      if (j.is_array()) {
        for (const auto& t : j) raws.push_back(data_table_from_json(t));
      } else {
        DataTable t = data_table_from_json(j);
        if (t.name.empty()) t.name = stem;
        raws.push_back(std::move(t));
      }
    }
  };
  for (const auto& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) ingest_file(f);
    } else {
      ingest_file(p);
    }
  }

  std::vector<std::string> blacklist;
  if (cfg.blacklist_path) blacklist = load_blacklist(*cfg.blacklist_path);
  auto [kept, report] = clean_tables(raws, blacklist);

  const auto rules = cfg.sensitive_path ? load_sensitive_rules(*cfg.sensitive_path)
                                        : default_sensitive_rules();
  for (auto& t : kept) t = sanitize_sensitive(t, rules);

  const auto dbs = link_tables(kept, cfg.min_overlap);
  auto out = open_output(output);
  out << manifest_to_json(dbs).dump(2) << "\n";

  nlohmann::json rejected = nlohmann::json::array();
  for (const auto& [table, rule] : report.rejected) {
    rejected.push_back({{"table", table}, {"rule", rule}});
    std::cerr << "rejected '" << table << "' by rule " << rule << "\n";
  }
  const nlohmann::json report_json = {{"input_count", report.input_count},
                                      {"kept_count", report.kept_count},
                                      {"databases", dbs.size()},
                                      {"rejected", std::move(rejected)}};
  if (!report_path.empty()) {
    auto rep = open_output(report_path);
    rep << report_json.dump(2) << "\n";
  }
  std::cerr << "kept " << report.kept_count << "/" << report.input_count << " tables in "
            << dbs.size() << " databases\n";
  return kExitOk;
}

// ---- synth ----------------------------------------------------------------

nlohmann::json raw_example_json(const RawExample& ex, const std::string& id) {
  return {{"id", id},
          {"db", ex.db_name},
          {"sql", print_sql(ex.sql)},
          {"hardness", to_string(ex.hardness)},
          {"table", table_to_json(ex.table)}};
}

int cmd_synth(const std::string& manifest_path, std::size_t n, std::uint64_t seed,
              const std::string& output_dir, const std::string& split_arg,
              const Config& cfg) {
  auto in = open_input(manifest_path);
  nlohmann::json manifest;
  in >> manifest;
  const auto dbs = manifest_from_json(manifest);

  GenConfig gen;
  gen.seed = seed;
  gen.max_depth = cfg.max_depth;
  gen.max_attempts_per_example = cfg.max_attempts_per_example;
  gen.rule_weights = cfg.rule_weights;
  gen.hardness_targets = cfg.hardness_targets;
  const auto examples = sample_dataset(dbs, gen, n);

  SplitSpec spec;
  spec.seed = seed;
  if (!split_arg.empty()) {
    const auto parts = split(split_arg, ',');
    if (parts.size() != 3) throw CLI::ValidationError("--split expects train,dev,test");
    spec.train = std::stod(parts[0]);
    spec.dev = std::stod(parts[1]);
    spec.test = std::stod(parts[2]);
  }
  const SplitResult splits = split_indices(examples.size(), spec);

  fs::create_directories(output_dir);
  const struct {
    const char* name;
    const std::vector<std::size_t>* idx;
  } parts[] = {{"train", &splits.train}, {"dev", &splits.dev}, {"test", &splits.test}};
  for (const auto& part : parts) {
    const fs::path path = fs::path(output_dir) / (std::string(part.name) + ".jsonl");
    auto out = open_output(path.string());
    std::map<Hardness, std::size_t> mix;
    for (std::size_t i : *part.idx) {
      char id[32];
      std::snprintf(id, sizeof(id), "s-%06zu", i);
      out << raw_example_json(examples[i], id).dump() << "\n";
      ++mix[examples[i].hardness];
    }
    nlohmann::json footer = {{"split", part.name}, {"count", part.idx->size()}};
    for (const auto& [level, count] : mix) footer["hardness"][to_string(level)] = count;
    auto stats = open_output((fs::path(output_dir) /
                              (std::string(part.name) + ".stats.json")).string());
    stats << footer.dump(2) << "\n";
    std::cerr << part.name << ": " << part.idx->size() << " examples\n";
  }
  return kExitOk;
}

// ---- record-stream commands ------------------------------------------------

struct StreamStats {
  std::size_t ok = 0;
  std::size_t bad = 0;
};

// order-preserving per-record processing with line-numbered diagnostics
StreamStats process_examples(std::istream& in, bool skip_bad,
                             const std::function<void(std::size_t, Example&)>& handle) {
  StreamStats stats;
  for_each_jsonl(
      in,
      [&](std::size_t line, const nlohmann::json& j) {
        try {
          Example ex = example_from_json(j);
          handle(line, ex);
          ++stats.ok;
        } catch (const std::exception& e) {
          if (!skip_bad) throw RecordError(line, e.what());
          std::cerr << "line " << line << ": skipped (" << e.what() << ")\n";
          ++stats.bad;
        }
      },
      skip_bad,
      [&](std::size_t line, const std::string& what) {
        std::cerr << "line " << line << ": skipped (" << what << ")\n";
        ++stats.bad;
      });
  return stats;
}

int cmd_ingest(const std::string& input, const std::string& output, bool skip_bad) {
  auto in = open_input(input);
  auto out = open_output(output);
  std::size_t bad = 0;
  // array-of-objects releases load whole; jsonl releases stream
  char first = 0;
  in >> std::ws;
  in.get(first);
  in.unget();
  std::vector<Example> examples;
  if (first == '[') {
    nlohmann::json all;
    in >> all;
    std::size_t index = 0;
    for (const auto& j : all) {
      ++index;
      try {
        std::string warning;
        Example ex = example_from_released_json(j, &warning);
        if (ex.id.empty()) ex.id = "r-" + std::to_string(index);
        if (!warning.empty()) std::cerr << "record " << index << ": " << warning << "\n";
        examples.push_back(std::move(ex));
      } catch (const std::exception& e) {
        if (!skip_bad) {
          std::cerr << "record " << index << ": " << e.what() << "\n";
          return kExitRecordErrors;
        }
        std::cerr << "record " << index << ": skipped (" << e.what() << ")\n";
        ++bad;
      }
    }
  } else {
    examples = read_examples_released(in, skip_bad, &bad, &std::cerr);
  }
  write_examples(out, examples);
  std::cerr << "ingested " << examples.size() << " examples";
  if (bad) std::cerr << ", skipped " << bad;
  std::cerr << "\n";
  return kExitOk;
}

int cmd_transform(const std::string& input, const std::string& output, bool skip_bad) {
  auto in = open_input(input);
  auto out = open_output(output);
  const DefaultTokenizer tok;
  const auto stats = process_examples(in, skip_bad, [&](std::size_t, Example& ex) {
    const SqlAst ast = parse_sql(ex.sql);
    const UnifiedGraph g = unify(build_sql_graph(ast), build_table_graph(ex.table));
    nlohmann::json j = export_graph(tokenize_graph(g, tok));
    j["id"] = ex.id;
    out << j.dump() << "\n";
  });
  std::cerr << "transformed " << stats.ok << " examples";
  if (stats.bad) std::cerr << ", skipped " << stats.bad;
  std::cerr << "\n";
  return kExitOk;
}

int cmd_describe(const std::string& input, const std::string& output,
                 const std::string& mode, bool skip_bad, const Config& cfg) {
  if (mode != "temp") throw CLI::ValidationError("--mode supports only 'temp'");
  auto in = open_input(input);
  auto out = open_output(output);
  const Lexicon lex = cfg.lexicon_path ? Lexicon::load(*cfg.lexicon_path) : Lexicon::defaults();
  lex.check_total();
  const TemplateSet ts =
      cfg.templates_path ? TemplateSet::load(*cfg.templates_path) : TemplateSet::defaults();
  const auto stats = process_examples(in, skip_bad, [&](std::size_t, Example& ex) {
    const SqlAst ast = parse_sql(ex.sql);
    const nlohmann::json j = {{"id", ex.id},
                              {"prediction", temp_describe(ast, ex.table, lex, ts)}};
    out << j.dump() << "\n";
  });
  std::cerr << "described " << stats.ok << " examples";
  if (stats.bad) std::cerr << ", skipped " << stats.bad;
  std::cerr << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& input, const std::string& pred_path,
             const std::string& metric, const std::string& format,
             const std::string& output, bool skip_bad) {
  auto in = open_input(input);
  std::map<std::string, std::string> predictions;
  if (!pred_path.empty()) {
    auto pin = open_input(pred_path);
    for_each_jsonl(pin, [&](std::size_t, const nlohmann::json& j) {
      predictions[j.at("id").get<std::string>()] = j.at("prediction").get<std::string>();
    });
  }
  std::ofstream per_example;
  if (!output.empty()) per_example = open_output(output);

  std::vector<CoverageScore> scores;
  std::size_t repetition_total = 0;
  std::size_t missing_predictions = 0;
  const auto stats = process_examples(in, skip_bad, [&](std::size_t, Example& ex) {
    std::string text;
    if (!pred_path.empty()) {
      const auto it = predictions.find(ex.id);
      if (it == predictions.end()) {
        ++missing_predictions;
        return;
      }
      text = it->second;
    } else {
      if (!ex.reference) throw std::runtime_error("example has no reference to score");
      text = *ex.reference;
    }
    nlohmann::json line = {{"id", ex.id}};
    if (metric == "coverage") {
      const CoverageScore s = coverage(text, ex.table);
      scores.push_back(s);
      line["covered"] = s.covered;
      line["total"] = s.total;
      line["ratio"] = s.ratio();
    } else {
      const std::size_t r = repetition(text, ex.table);
      repetition_total += r;
      line["repetition"] = r;
    }
    if (per_example.is_open()) per_example << line.dump() << "\n";
  });

  nlohmann::json summary = {{"metric", metric}, {"examples", stats.ok}};
  if (metric == "coverage") {
    summary["mean_percent"] = corpus_coverage_percent(scores);
  } else {
    summary["total"] = repetition_total;
    summary["mean"] = stats.ok == 0 ? 0.0
                                    : static_cast<double>(repetition_total) /
                                          static_cast<double>(stats.ok);
  }
  if (missing_predictions) summary["missing_predictions"] = missing_predictions;
  if (format == "json") {
    std::cout << summary.dump(2) << "\n";
  } else if (metric == "coverage") {
    std::cout << "coverage mean " << canonical_number(summary["mean_percent"].get<double>(), 2)
              << " over " << stats.ok << " examples\n";
  } else {
    std::cout << "repetition total " << repetition_total << " over " << stats.ok
              << " examples (mean " << canonical_number(summary["mean"].get<double>(), 3)
              << ")\n";
  }
  return missing_predictions > 0 && !skip_bad ? kExitRecordErrors : kExitOk;
}

int cmd_stats(const std::string& input, const std::string& format, bool skip_bad) {
  auto in = open_input(input);
  std::size_t bad = 0;
  const auto examples = read_examples(in, skip_bad, &bad);
  const ComplexityStats stats = dataset_stats(examples);
  if (format == "json") {
    const nlohmann::json j = {
        {"examples", stats.examples},
        {"parse_failures", stats.parse_failures},
        {"column_number", stats.columns},
        {"row_number", stats.rows},
        {"sql_hardness", stats.hardness},
        {"target_length", stats.target_length},
    };
    std::cout << j.dump(2) << "\n";
  } else {
    const auto row = [](const char* label, const std::array<std::size_t, 4>& buckets,
                        const char* b0, const char* b1, const char* b2, const char* b3) {
      std::cout << label << "\n";
      const char* names[] = {b0, b1, b2, b3};
      for (int i = 0; i < 4; ++i) {
        std::cout << "  " << names[i] << ": " << buckets[i] << "\n";
      }
    };
    std::cout << "examples: " << stats.examples << "\n";
    row("column number", stats.columns, "1", "2", "3", ">=4");
    row("row number", stats.rows, "1", "2", "3", ">=4");
    row("sql hardness", stats.hardness, "easy", "medium", "hard", "extra");
    row("target length", stats.target_length, "<20", "<40", "<60", ">=60");
    if (stats.parse_failures) std::cout << "parse failures: " << stats.parse_failures << "\n";
  }
  return bad > 0 && !skip_bad ? kExitRecordErrors : kExitOk;
}

int cmd_lne_check(const std::string& input, std::uint64_t seed, std::size_t width,
                  std::size_t heads) {
  auto in = open_input(input);
  std::size_t checked = 0, violations = 0;
  for_each_jsonl(in, [&](std::size_t line, const nlohmann::json& j) {
    const TokenGraph tg = import_graph(j);
    const auto adj = adjacency(tg);
    const std::size_t n = tg.tokens.size();
    Rng rng(Rng::mix(seed, line));
    Matrix h(n, width);
    for (double& x : h.data) x = rng.uniform(-0.1, 0.1);
    std::vector<int> segments;
    for (const auto& t : tg.tokens) segments.push_back(t.segment_id);
    const LneParams p = LneParams::seeded(
        width, heads, static_cast<std::size_t>(tg.segment_count), Rng::mix(seed, line * 31));
    const Matrix he = node_embed(h, segments, p);
    std::vector<Matrix> attention;
    const Matrix out = gat_forward(he, adj, p, &attention);
    double worst_row_sum = 0;
    bool mask_ok = true;
    for (const auto& head : attention) {
      for (std::size_t v = 0; v < n; ++v) {
        double total = 0;
        for (std::size_t u = 0; u < n; ++u) {
          if (!adj[v][u] && head.at(v, u) != 0.0) mask_ok = false;
          total += head.at(v, u);
        }
        worst_row_sum = std::max(worst_row_sum, std::fabs(total - 1.0));
      }
    }
    const bool ok = mask_ok && worst_row_sum < 1e-9;
    if (!ok) ++violations;
    const std::string id = j.contains("id") ? j.at("id").get<std::string>()
                                            : std::to_string(line);
    std::cout << id << ": " << (ok ? "ok" : "VIOLATION") << " tokens=" << n
              << " row_sum_err=" << worst_row_sum << " digest=" << std::hex
              << matrix_digest(out) << std::dec << "\n";
    ++checked;
  });
  std::cerr << "checked " << checked << " graphs\n";
  return violations == 0 ? kExitOk : kExitRecordErrors;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"answer-to-sequence data toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name
  app.set_version_flag("--version", "catsforge 0.1.0");

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (default: $CATS_FORGE_CONFIG)");

  // build-db
  auto* build = app.add_subcommand("build-db", "clean, sanitize and link raw tables");
  std::vector<std::string> build_inputs;
  std::string build_output = "manifest.json";
  std::string build_report;
  build->add_option("--input", build_inputs, "table files (.csv/.json) or directories")
      ->required();
  build->add_option("--output", build_output, "database manifest path");
  build->add_option("--report", build_report, "cleaning report path");

  // synth
  auto* synth = app.add_subcommand("synth", "generate SQL/table example splits");
  std::string synth_manifest;
  std::size_t synth_n = 100;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "dataset";
  std::string synth_split;
  synth->add_option("--manifest", synth_manifest, "database manifest")->required();
  synth->add_option("-n,--count", synth_n, "number of examples");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--output", synth_out, "output directory");
  synth->add_option("--split", synth_split, "train,dev,test fractions (default 0.8,0.1,0.1)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "map released-layout records to example JSONL");
  std::string ingest_in, ingest_out;
  bool ingest_skip = false;
  ingest->add_option("--input", ingest_in, "released .json/.jsonl file")->required();
  ingest->add_option("--output", ingest_out, "example JSONL path")->required();
  ingest->add_flag("--skip-bad", ingest_skip, "skip unconvertible records");

  // transform
  auto* transform = app.add_subcommand("transform", "examples -> token-graph JSONL");
  std::string tr_in, tr_out;
  bool tr_skip = false;
  transform->add_option("--input", tr_in, "example JSONL")->required();
  transform->add_option("--output", tr_out, "graph JSONL")->required();
  transform->add_flag("--skip-bad", tr_skip, "skip bad records");

  // describe
  auto* describe = app.add_subcommand("describe", "render descriptions");
  std::string de_in, de_out, de_mode = "temp";
  bool de_skip = false;
  describe->add_option("--input", de_in, "example JSONL")->required();
  describe->add_option("--output", de_out, "prediction JSONL")->required();
  describe->add_option("--mode", de_mode, "describer (temp)");
  describe->add_flag("--skip-bad", de_skip, "skip bad records");

  // eval
  auto* eval = app.add_subcommand("eval", "score predictions or references");
  std::string ev_in, ev_pred, ev_metric = "coverage", ev_format = "text", ev_out;
  bool ev_skip = false;
  eval->add_option("--input", ev_in, "example JSONL (tables and references)")->required();
  eval->add_option("--pred", ev_pred, "prediction JSONL; omit to score references");
  eval->add_option("--metric", ev_metric, "coverage|repetition")
      ->check(CLI::IsMember({"coverage", "repetition"}));
  eval->add_option("--format", ev_format, "json|text")
      ->check(CLI::IsMember({"json", "text"}));
  eval->add_option("--output", ev_out, "per-example scores JSONL");
  eval->add_flag("--skip-bad", ev_skip, "skip bad records");

  // stats
  auto* stats = app.add_subcommand("stats", "complexity distribution report");
  std::string st_in, st_format = "text";
  bool st_skip = false;
  stats->add_option("--input", st_in, "example JSONL")->required();
  stats->add_option("--format", st_format, "json|text")
      ->check(CLI::IsMember({"json", "text"}));
  stats->add_flag("--skip-bad", st_skip, "skip bad records");

  // lne-check
  auto* lne = app.add_subcommand("lne-check", "kernel invariant checks over exported graphs");
  std::string ln_in;
  std::uint64_t ln_seed = 0;
  std::size_t ln_width = 16, ln_heads = 2;
  lne->add_option("--input", ln_in, "graph JSONL")->required();
  lne->add_option("--seed", ln_seed, "random seed");
  lne->add_option("--width", ln_width, "model width d");
  lne->add_option("--heads", ln_heads, "attention heads H");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Config cfg = resolve_config(config_path);
    if (build->parsed()) return cmd_build_db(build_inputs, build_output, build_report, cfg);
    if (synth->parsed())
      return cmd_synth(synth_manifest, synth_n, synth_seed, synth_out, synth_split, cfg);
    if (ingest->parsed()) return cmd_ingest(ingest_in, ingest_out, ingest_skip);
    if (transform->parsed()) return cmd_transform(tr_in, tr_out, tr_skip);
    if (describe->parsed()) return cmd_describe(de_in, de_out, de_mode, de_skip, cfg);
    if (eval->parsed()) return cmd_eval(ev_in, ev_pred, ev_metric, ev_format, ev_out, ev_skip);
    if (stats->parsed()) return cmd_stats(st_in, st_format, st_skip);
    if (lne->parsed()) return cmd_lne_check(ln_in, ln_seed, ln_width, ln_heads);
  } catch (const RecordError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRecordErrors;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRecordErrors;
  }
  return kExitUsage;
}
