#include "catsforge/dataset.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "catsforge/rng.hpp"
#include "catsforge/strings.hpp"

namespace catsforge {

namespace {

Value cell_from_string(const std::string& s) {
  // typed interpretation is re-derived lexically; Number cells get the
  // canonical alternative used by coverage matching
  if (s.empty()) return Value::null();
  if (auto n = parse_number(s)) return Value::number(*n, s);
  return Value::text(s);
}

}  // namespace

nlohmann::json table_to_json(const ResultTable& rt) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rt.rows) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : row) cells.push_back(cell.str());
    rows.push_back(std::move(cells));
  }
  return {{"header", rt.headers}, {"rows", std::move(rows)}};
}

ResultTable table_from_json(const nlohmann::json& j) {
  ResultTable rt;
  if (!j.is_object() || !j.contains("header") || !j.contains("rows")) {
    throw std::runtime_error("table must be an object with 'header' and 'rows'");
  }
  for (const auto& h : j.at("header")) rt.headers.push_back(h.get<std::string>());
  for (const auto& row : j.at("rows")) {
    std::vector<Value> cells;
    for (const auto& cell : row) {
      if (cell.is_string()) {
        cells.push_back(cell_from_string(cell.get<std::string>()));
      } else if (cell.is_number()) {
        cells.push_back(Value::number(cell.get<double>()));
      } else if (cell.is_boolean()) {
        cells.push_back(Value::boolean(cell.get<bool>(), cell.get<bool>() ? "true" : "false"));
      } else if (cell.is_null()) {
        cells.push_back(Value::null());
      } else {
        throw std::runtime_error("unsupported cell type in table row");
      }
    }
    if (cells.size() != rt.headers.size()) {
      throw std::runtime_error("row width differs from header width");
    }
    rt.rows.push_back(std::move(cells));
  }
  return rt;
}

nlohmann::json example_to_json(const Example& ex) {
  nlohmann::json j = {{"id", ex.id},
                      {"db", ex.db},
                      {"sql", ex.sql},
                      {"hardness", to_string(ex.hardness)},
                      {"table", table_to_json(ex.table)}};
  if (ex.reference) j["reference"] = *ex.reference;
  return j;
}

Example example_from_json(const nlohmann::json& j) {
  Example ex;
  ex.id = j.at("id").get<std::string>();
  ex.db = j.value("db", "");
  ex.sql = j.at("sql").get<std::string>();
  ex.table = table_from_json(j.at("table"));
  if (ex.table.rows.empty()) throw std::runtime_error("example table is empty");
  if (j.contains("reference")) ex.reference = j.at("reference").get<std::string>();
  if (j.contains("hardness")) {
    const auto h = hardness_from_string(j.at("hardness").get<std::string>());
    if (!h) throw std::runtime_error("unknown hardness level");
    ex.hardness = *h;
  }
  return ex;
}

Example example_from_released_json(const nlohmann::json& j, std::string* warning) {
  const auto pick = [&](std::initializer_list<const char*> keys) -> const nlohmann::json* {
    for (const char* key : keys) {
      if (j.contains(key)) return &j.at(key);
    }
    return nullptr;
  };
  Example ex;
  if (const auto* id = pick({"id", "example_id", "qid", "uid"})) {
    ex.id = id->is_string() ? id->get<std::string>() : id->dump();
  }
  if (const auto* db = pick({"db", "db_name", "db_id", "database"})) {
    ex.db = db->is_string() ? db->get<std::string>() : db->dump();
  }
  const auto* sql = pick({"sql", "query", "sql_query", "s"});
  if (!sql || !sql->is_string()) throw std::runtime_error("no sql field found");
  ex.sql = sql->get<std::string>();

  const auto* table = pick({"table", "result", "answer", "execution_result", "t"});
  if (!table) throw std::runtime_error("no table field found");
  nlohmann::json tbl = *table;
  if (tbl.is_string()) tbl = nlohmann::json::parse(tbl.get<std::string>());
  if (!tbl.is_object()) throw std::runtime_error("table field is not an object");
  // header/rows key variants
  nlohmann::json norm;
  for (const char* key : {"header", "headers", "columns", "column_names"}) {
    if (tbl.contains(key)) {
      norm["header"] = tbl.at(key);
      break;
    }
  }
  for (const char* key : {"rows", "cells", "values", "data"}) {
    if (tbl.contains(key)) {
      norm["rows"] = tbl.at(key);
      break;
    }
  }
  if (!norm.contains("header") || !norm.contains("rows")) {
    throw std::runtime_error("table field lacks header/rows");
  }
  ex.table = table_from_json(norm);

  if (const auto* ref = pick({"reference", "text", "description", "response", "target",
                              "y", "label", "ref"})) {
    if (ref->is_string()) ex.reference = ref->get<std::string>();
  }
  if (!ex.reference && warning) *warning = "record has no reference text";
  if (const auto* hard = pick({"hardness", "difficulty", "level"})) {
    if (hard->is_string()) {
      if (const auto h = hardness_from_string(hard->get<std::string>())) ex.hardness = *h;
    }
  }
  return ex;
}

std::size_t for_each_jsonl(
    std::istream& in,
    const std::function<void(std::size_t, const nlohmann::json&)>& on_record, bool skip_bad,
    const std::function<void(std::size_t, const std::string&)>& on_bad) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      on_record(line_no, j);
      ++count;
    } catch (const std::exception& e) {
      if (!skip_bad) throw RecordError(line_no, e.what());
      if (on_bad) on_bad(line_no, e.what());
    }
  }
  return count;
}

std::vector<Example> read_examples(std::istream& in, bool skip_bad, std::size_t* bad_count) {
  std::vector<Example> out;
  std::size_t bad = 0;
  for_each_jsonl(
      in, [&](std::size_t, const nlohmann::json& j) { out.push_back(example_from_json(j)); },
      skip_bad, [&](std::size_t, const std::string&) { ++bad; });
  if (bad_count) *bad_count = bad;
  return out;
}

std::vector<Example> read_examples_released(std::istream& in, bool skip_bad,
                                            std::size_t* bad_count, std::ostream* warnings) {
  std::vector<Example> out;
  std::size_t bad = 0;
  std::size_t line_no = 0;
  for_each_jsonl(
      in,
      [&](std::size_t line, const nlohmann::json& j) {
        line_no = line;
        std::string warning;
        Example ex = example_from_released_json(j, &warning);
        if (ex.id.empty()) ex.id = "r-" + std::to_string(line);
        if (!warning.empty() && warnings) {
          *warnings << "line " << line << ": " << warning << "\n";
        }
        out.push_back(std::move(ex));
      },
      skip_bad, [&](std::size_t, const std::string&) { ++bad; });
  if (bad_count) *bad_count = bad;
  return out;
}

void write_examples(std::ostream& out, const std::vector<Example>& examples) {
  for (const auto& ex : examples) {
    out << example_to_json(ex).dump() << "\n";
  }
}

DataTable table_from_csv(std::istream& in, const std::string& name) {
  DataTable t;
  t.name = name;
  std::string line;
  bool header_done = false;
  const auto parse_line = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < s.size() && s[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    fields.push_back(std::move(field));
    return fields;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && !header_done) continue;
    const auto fields = parse_line(line);
    if (!header_done) {
      for (const auto& f : fields) t.columns.push_back({strip(f), CType::Text});
      header_done = true;
      continue;
    }
    std::vector<Value> row;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const std::string cell = c < fields.size() ? strip(fields[c]) : "";
      row.push_back(cell.empty() ? Value::null() : Value::text(cell));
    }
    t.rows.push_back(std::move(row));
  }
  if (!header_done) throw std::runtime_error("CSV file has no header row: " + name);
  return t;
}

DataTable data_table_from_json(const nlohmann::json& j) {
  DataTable t;
  t.name = j.value("name", "");
  if (!j.contains("header")) throw std::runtime_error("table JSON lacks 'header'");
  std::vector<CType> types;
  if (j.contains("types")) {
    for (const auto& s : j.at("types")) {
      const auto ct = ctype_from_name(s.get<std::string>());
      if (!ct) throw std::runtime_error("unknown column type '" + s.get<std::string>() + "'");
      types.push_back(*ct);
    }
  }
  std::size_t c = 0;
  for (const auto& h : j.at("header")) {
    Column col{h.get<std::string>(), c < types.size() ? types[c] : CType::Text};
    t.columns.push_back(std::move(col));
    ++c;
  }
  for (const auto& row : j.at("rows")) {
    std::vector<Value> cells;
    std::size_t i = 0;
    for (const auto& cell : row) {
      const CType ct = i < t.columns.size() ? t.columns[i].type : CType::Text;
      if (cell.is_string()) {
        cells.push_back(types.empty() ? (cell.get<std::string>().empty()
                                             ? Value::null()
                                             : Value::text(cell.get<std::string>()))
                                      : parse_cell(cell.get<std::string>(), ct));
      } else if (cell.is_number()) {
        cells.push_back(Value::number(cell.get<double>()));
      } else if (cell.is_boolean()) {
        cells.push_back(Value::boolean(cell.get<bool>(), cell.get<bool>() ? "true" : "false"));
      } else {
        cells.push_back(Value::null());
      }
      ++i;
    }
    if (cells.size() != t.columns.size()) {
      throw std::runtime_error("row width differs from header width in table '" + t.name + "'");
    }
    t.rows.push_back(std::move(cells));
  }
  if (!types.empty()) {
    // declared types are trusted; otherwise callers run infer_column_types
    for (std::size_t i = 0; i < t.columns.size() && i < types.size(); ++i) {
      t.columns[i].type = types[i];
    }
  }
  return t;
}

nlohmann::json data_table_to_json(const DataTable& t) {
  nlohmann::json header = nlohmann::json::array();
  nlohmann::json types = nlohmann::json::array();
  for (const auto& col : t.columns) {
    header.push_back(col.name);
    types.push_back(ctype_name(col.type));
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : row) cells.push_back(cell.str());
    rows.push_back(std::move(cells));
  }
  return {{"name", t.name},
          {"header", std::move(header)},
          {"types", std::move(types)},
          {"rows", std::move(rows)}};
}

nlohmann::json manifest_to_json(const std::vector<Database>& dbs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& db : dbs) {
    nlohmann::json links = nlohmann::json::array();
    for (const auto& link : db.links) {
      links.push_back({link.table_a, link.col_a, link.table_b, link.col_b});
    }
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : db.tables) tables.push_back(data_table_to_json(t));
    out.push_back({{"name", db.name}, {"tables", std::move(tables)}, {"links", std::move(links)}});
  }
  return {{"databases", std::move(out)}};
}

std::vector<Database> manifest_from_json(const nlohmann::json& j) {
  std::vector<Database> dbs;
  for (const auto& d : j.at("databases")) {
    Database db;
    db.name = d.at("name").get<std::string>();
    for (const auto& t : d.at("tables")) db.tables.push_back(data_table_from_json(t));
    if (d.contains("links")) {
      for (const auto& l : d.at("links")) {
        TableLink link{l.at(0).get<std::string>(), l.at(1).get<std::string>(),
                       l.at(2).get<std::string>(), l.at(3).get<std::string>()};
        if (!db.find_table(link.table_a) || !db.find_table(link.table_b)) {
          throw std::runtime_error("link endpoint missing in database '" + db.name + "'");
        }
        db.links.push_back(std::move(link));
      }
    }
    dbs.push_back(std::move(db));
  }
  return dbs;
}

SplitResult split_indices(std::size_t n, const SplitSpec& spec) {
  const double total = spec.train + spec.dev + spec.test;
  if (total <= 0) throw std::runtime_error("split fractions must be positive");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(Rng::mix(spec.seed, 0x517Eu));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  const auto bucket = [&](double f) {
    return static_cast<std::size_t>(static_cast<double>(n) * (f / total));
  };
  const std::size_t n_dev = bucket(spec.dev);
  const std::size_t n_test = bucket(spec.test);
  const std::size_t n_train = n - n_dev - n_test;
  SplitResult out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.dev.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                 order.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev), order.end());
  return out;
}

}  // namespace catsforge
