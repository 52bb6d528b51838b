#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "json.hpp"

#include "catsforge/dataset.hpp"
#include "catsforge/graph.hpp"
#include "catsforge/lne.hpp"
#include "catsforge/metrics.hpp"
#include "catsforge/rng.hpp"
#include "catsforge/sql_parser.hpp"
#include "catsforge/sql_synth.hpp"
#include "catsforge/table.hpp"
#include "catsforge/temp_gen.hpp"

namespace py = pybind11;
using namespace catsforge;

namespace {

nlohmann::json to_json(const py::handle& obj) {
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& item : obj) arr.push_back(to_json(item));
    return arr;
  }
  if (py::isinstance<py::dict>(obj)) {
    nlohmann::json map = nlohmann::json::object();
    for (const auto& item : obj.cast<py::dict>()) {
      map[item.first.cast<std::string>()] = to_json(item.second);
    }
    return map;
  }
  throw py::type_error("unsupported value in JSON-like structure");
}

py::object from_json(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(from_json(item));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) {
        out[py::str(key)] = from_json(value);
      }
      return out;
    }
    default: return py::none();
  }
}

Database database_from(const py::dict& d) {
  const nlohmann::json j = to_json(d);
  nlohmann::json manifest = {{"databases", nlohmann::json::array({j})}};
  auto dbs = manifest_from_json(manifest);
  return std::move(dbs.front());
}

ResultTable result_table_from(const py::dict& d) { return table_from_json(to_json(d)); }

py::dict example_dict(const std::string& id, const RawExample& ex) {
  nlohmann::json j = {{"id", id},
                      {"db", ex.db_name},
                      {"sql", print_sql(ex.sql)},
                      {"hardness", to_string(ex.hardness)},
                      {"table", table_to_json(ex.table)}};
  return from_json(j).cast<py::dict>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "answer-to-sequence data toolkit: SQL synthesis, execution, graph "
            "transformation and evaluation metrics";

  // ---- sql text operations ----
  m.def("canonical_sql", [](const std::string& text) { return print_sql(parse_sql(text)); },
        py::arg("sql"), "Parse a query and print its canonical single-line form.");
  m.def("classify_hardness",
        [](const std::string& text) { return std::string(to_string(classify_hardness(parse_sql(text)))); },
        py::arg("sql"));
  m.def("validate",
        [](const std::string& text, const py::dict& db) {
          const Database database = database_from(db);
          py::list out;
          for (const auto& err : validate_schema(parse_sql(text), database)) {
            py::dict d;
            d["kind"] = to_string(err.kind);
            d["message"] = err.message;
            out.append(d);
          }
          return out;
        },
        py::arg("sql"), py::arg("db"));

  // ---- execution ----
  m.def("execute",
        [](const std::string& text, const py::dict& db, int avg_decimals) {
          ExecOptions opts;
          opts.avg_decimals = avg_decimals;
          const ResultTable rt = execute(parse_sql(text), database_from(db), opts);
          return from_json(table_to_json(rt));
        },
        py::arg("sql"), py::arg("db"), py::arg("avg_decimals") = 2);

  // ---- tables ----
  m.def("infer_column_types",
        [](const py::dict& table) {
          return from_json(data_table_to_json(infer_column_types(data_table_from_json(to_json(table)))));
        },
        py::arg("table"));
  m.def("clean_tables",
        [](const py::list& tables, const std::vector<std::string>& blacklist) {
          std::vector<DataTable> raws;
          for (const auto& t : tables) {
            raws.push_back(data_table_from_json(to_json(t)));
          }
          auto [kept, report] = clean_tables(raws, blacklist);
          py::list kept_list;
          for (const auto& t : kept) kept_list.append(from_json(data_table_to_json(t)));
          nlohmann::json rejected = nlohmann::json::array();
          for (const auto& [name, rule] : report.rejected) {
            rejected.push_back({{"table", name}, {"rule", rule}});
          }
          py::dict rep;
          rep["input_count"] = report.input_count;
          rep["kept_count"] = report.kept_count;
          rep["rejected"] = from_json(rejected);
          return py::make_tuple(kept_list, rep);
        },
        py::arg("tables"), py::arg("blacklist") = std::vector<std::string>{});
  m.def("sanitize_sensitive",
        [](const py::dict& table) {
          return from_json(data_table_to_json(
              sanitize_sensitive(data_table_from_json(to_json(table)), default_sensitive_rules())));
        },
        py::arg("table"));
  m.def("link_tables",
        [](const py::list& tables, double min_overlap) {
          std::vector<DataTable> typed;
          for (const auto& t : tables) typed.push_back(data_table_from_json(to_json(t)));
          return from_json(manifest_to_json(link_tables(typed, min_overlap)));
        },
        py::arg("tables"), py::arg("min_overlap") = 0.5);

  // ---- synthesis ----
  m.def("generate_sql",
        [](const py::dict& db, std::uint64_t seed, int max_depth) {
          GenConfig cfg;
          cfg.seed = seed;
          cfg.max_depth = max_depth;
          Rng rng(seed);
          return print_sql(generate_sql(database_from(db), cfg, rng));
        },
        py::arg("db"), py::arg("seed") = 0, py::arg("max_depth") = 2);
  m.def("sample_dataset",
        [](const py::list& dbs, std::size_t n, std::uint64_t seed,
           const std::map<std::string, double>& targets) {
          std::vector<Database> databases;
          for (const auto& d : dbs) databases.push_back(database_from(d.cast<py::dict>()));
          GenConfig cfg;
          cfg.seed = seed;
          if (!targets.empty()) {
            cfg.hardness_targets.clear();
            for (const auto& [key, value] : targets) {
              const auto h = hardness_from_string(key);
              if (!h) throw py::value_error("unknown hardness level: " + key);
              cfg.hardness_targets[*h] = value;
            }
          } else {
            cfg.hardness_targets = {{Hardness::Easy, 0.25},
                                    {Hardness::Medium, 0.25},
                                    {Hardness::Hard, 0.25},
                                    {Hardness::ExtraHard, 0.25}};
          }
          const auto examples = sample_dataset(databases, cfg, n);
          py::list out;
          for (std::size_t i = 0; i < examples.size(); ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "s-%06zu", i);
            out.append(example_dict(id, examples[i]));
          }
          return out;
        },
        py::arg("dbs"), py::arg("n"), py::arg("seed") = 0,
        py::arg("hardness_targets") = std::map<std::string, double>{});

  // ---- graphs ----
  m.def("build_graph",
        [](const std::string& sql, const py::dict& table) {
          const SqlAst ast = parse_sql(sql);
          const UnifiedGraph g =
              unify(build_sql_graph(ast), build_table_graph(result_table_from(table)));
          return from_json(export_graph(tokenize_graph(g, DefaultTokenizer())));
        },
        py::arg("sql"), py::arg("table"),
        "Unified graph of the query and its result table, expanded to the "
        "token graph with per-token segment ids.");

  // ---- kernel ----
  m.def("lne_forward",
        [](const py::dict& graph, std::uint64_t seed, std::size_t width, std::size_t heads) {
          const TokenGraph tg = import_graph(to_json(graph));
          const auto adj = adjacency(tg);
          const std::size_t n = tg.tokens.size();
          Rng rng(seed);
          Matrix h(n, width);
          for (double& x : h.data) x = rng.uniform(-0.1, 0.1);
          std::vector<int> segments;
          for (const auto& t : tg.tokens) segments.push_back(t.segment_id);
          const LneParams p = LneParams::seeded(
              width, heads, static_cast<std::size_t>(tg.segment_count), Rng::mix(seed, 1));
          const Matrix he = node_embed(h, segments, p);
          std::vector<Matrix> attention;
          const Matrix out = gat_forward(he, adj, p, &attention);
          double worst = 0;
          for (const auto& head : attention) {
            for (std::size_t v = 0; v < n; ++v) {
              double total = 0;
              for (std::size_t u = 0; u < n; ++u) total += head.at(v, u);
              worst = std::max(worst, std::fabs(total - 1.0));
            }
          }
          py::list rows;
          for (std::size_t v = 0; v < out.rows; ++v) {
            py::list row;
            for (std::size_t c = 0; c < out.cols; ++c) row.append(out.at(v, c));
            rows.append(row);
          }
          py::dict result;
          result["output"] = rows;
          result["row_sum_error"] = worst;
          result["digest"] = matrix_digest(out);
          return result;
        },
        py::arg("graph"), py::arg("seed") = 0, py::arg("width") = 16, py::arg("heads") = 2);

  // ---- description + metrics ----
  m.def("temp_describe",
        [](const std::string& sql, const py::dict& table) {
          return temp_describe(parse_sql(sql), result_table_from(table), Lexicon::defaults(),
                               TemplateSet::defaults());
        },
        py::arg("sql"), py::arg("table"));
  m.def("coverage",
        [](const std::string& text, const py::dict& table) {
          const CoverageScore s = coverage(text, result_table_from(table));
          py::dict out;
          out["covered"] = s.covered;
          out["total"] = s.total;
          out["ratio"] = s.ratio();
          return out;
        },
        py::arg("text"), py::arg("table"));
  m.def("repetition",
        [](const std::string& text, const py::dict& table) {
          return repetition(text, result_table_from(table));
        },
        py::arg("text"), py::arg("table"));
  m.def("dataset_stats",
        [](const py::list& examples) {
          std::vector<Example> parsed;
          for (const auto& e : examples) parsed.push_back(example_from_json(to_json(e)));
          const ComplexityStats stats = dataset_stats(parsed);
          py::dict out;
          out["examples"] = stats.examples;
          out["parse_failures"] = stats.parse_failures;
          out["column_number"] = py::cast(stats.columns);
          out["row_number"] = py::cast(stats.rows);
          out["sql_hardness"] = py::cast(stats.hardness);
          out["target_length"] = py::cast(stats.target_length);
          return out;
        },
        py::arg("examples"));

  m.attr("__version__") = "0.1.0";
}
