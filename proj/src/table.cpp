#include "catsforge/table.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "catsforge/strings.hpp"

namespace catsforge {

std::size_t DataTable::column_index(std::string_view col_name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == col_name) return i;
  }
  return static_cast<std::size_t>(-1);
}

bool DataTable::rectangular() const {
  return std::all_of(rows.begin(), rows.end(), [&](const auto& r) {
    return r.size() == columns.size();
  });
}

const DataTable* Database::find_table(std::string_view table_name) const {
  for (const auto& t : tables) {
    if (t.name == table_name) return &t;
  }
  return nullptr;
}

DataTable infer_column_types(const DataTable& raw) {
  if (raw.rows.empty()) throw EmptyTableError("table has no rows: " + raw.name);
  DataTable out;
  out.name = raw.name;
  out.columns = raw.columns;
  for (std::size_t c = 0; c < raw.columns.size(); ++c) {
    std::size_t considered = 0, as_number = 0, as_time = 0, as_bool = 0;
    for (const auto& row : raw.rows) {
      if (c >= row.size()) continue;
      const std::string cell = strip(row[c].str());
      if (row[c].is_null() && cell.empty()) continue;
      ++considered;
      if (parse_number(cell)) ++as_number;
      if (parse_time(cell)) ++as_time;
      if (parse_bool(cell)) ++as_bool;
    }
    CType t = CType::Text;
    if (considered > 0) {
      const std::size_t best = std::max({as_number, as_time, as_bool});
      const int winners = (as_number == best) + (as_time == best) + (as_bool == best);
      if (best * 2 > considered && winners == 1) {
        t = as_number == best ? CType::Number
                              : (as_time == best ? CType::Time : CType::Bool);
      }
    }
    out.columns[c].type = t;
  }
  out.rows.reserve(raw.rows.size());
  for (const auto& row : raw.rows) {
    std::vector<Value> cells;
    cells.reserve(out.columns.size());
    for (std::size_t c = 0; c < out.columns.size(); ++c) {
      const std::string cell = c < row.size() ? row[c].str() : "";
      cells.push_back(parse_cell(cell, out.columns[c].type));
    }
    out.rows.push_back(std::move(cells));
  }
  return out;
}

namespace {

bool hits_blacklist(const DataTable& t, const std::vector<std::string>& blacklist) {
  const auto hit = [&](const std::string& s) {
    const std::string lower = to_lower_ascii(s);
    for (const auto& word : blacklist) {
      if (!word.empty() && contains(lower, to_lower_ascii(word))) return true;
    }
    return false;
  };
  for (const auto& col : t.columns) {
    if (hit(col.name)) return true;
  }
  for (const auto& row : t.rows) {
    for (const auto& cell : row) {
      if (hit(cell.str())) return true;
    }
  }
  return false;
}

bool text_ratio_too_low(const DataTable& t) {
  if (t.columns.empty()) return true;
  const auto text_cols = std::count_if(
      t.columns.begin(), t.columns.end(),
      [](const Column& c) { return c.type == CType::Text; });
  return static_cast<double>(text_cols) < 0.3 * static_cast<double>(t.columns.size());
}

bool dominated_by_one_value(const DataTable& t) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& row : t.rows) {
    for (const auto& cell : row) {
      ++counts[cell.str()];
      ++total;
    }
  }
  if (total == 0) return false;
  for (const auto& [value, n] : counts) {
    if (2 * n > total) return true;
  }
  return false;
}

}  // namespace

std::pair<std::vector<DataTable>, CleaningReport> clean_tables(
    const std::vector<DataTable>& raws, const std::vector<std::string>& blacklist) {
  std::vector<DataTable> kept;
  CleaningReport report;
  report.input_count = raws.size();
  for (const auto& raw : raws) {
    if (raw.rows.empty() || raw.columns.empty()) {
      report.rejected.emplace_back(raw.name, 3);
      continue;
    }
    DataTable typed = infer_column_types(raw);
    int rule = 0;
    if (hits_blacklist(typed, blacklist)) {
      rule = 1;
    } else if (text_ratio_too_low(typed)) {
      rule = 2;
    } else if (typed.columns.size() < 2 || typed.rows.size() < 2) {
      rule = 3;
    } else if (dominated_by_one_value(typed)) {
      rule = 4;
    }
    if (rule != 0) {
      report.rejected.emplace_back(typed.name, rule);
    } else {
      kept.push_back(std::move(typed));
    }
  }
  report.kept_count = kept.size();
  return {std::move(kept), std::move(report)};
}

std::vector<SensitiveRule> default_sensitive_rules() {
  const auto make = [](std::string category, std::string pattern) {
    SensitiveRule r;
    r.category = category;
    r.pattern_src = pattern;
    r.pattern = std::regex(pattern);
    r.placeholder = "<" + category + ">";
    return r;
  };
  return {
      make("ID_NUMBER", R"(\d{17}[0-9Xx])"),
      make("CARD_NUMBER", R"(\d{13,19})"),
      make("PHONE_NUMBER", R"(1[3-9]\d{9})"),
      make("PASSWORD", R"([A-Za-z0-9@#$%!*]*(?:password|passwd|pwd)[A-Za-z0-9@#$%!*]*)"),
  };
}

std::vector<SensitiveRule> load_sensitive_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sensitive-pattern file: " + path);
  std::vector<SensitiveRule> rules;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("bad sensitive-pattern line (want CATEGORY<TAB>REGEX): " + t);
    }
    SensitiveRule r;
    r.category = strip(t.substr(0, tab));
    r.pattern_src = strip(t.substr(tab + 1));
    r.pattern = std::regex(r.pattern_src);
    r.placeholder = "<" + r.category + ">";
    rules.push_back(std::move(r));
  }
  return rules;
}

DataTable sanitize_sensitive(const DataTable& table,
                             const std::vector<SensitiveRule>& rules) {
  DataTable out = table;
  for (auto& row : out.rows) {
    for (auto& cell : row) {
      if (cell.is_null()) continue;
      for (const auto& rule : rules) {
        if (std::regex_match(cell.str(), rule.pattern)) {
          cell = Value::text(rule.placeholder);
          break;
        }
      }
    }
  }
  return out;
}

std::vector<std::string> load_blacklist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open blacklist file: " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = strip(line);
    if (!t.empty() && t[0] != '#') words.push_back(t);
  }
  return words;
}

namespace {

std::string norm_col_name(const std::string& s) {
  return to_lower_ascii(remove_whitespace(s));
}

std::set<std::string> distinct_values(const DataTable& t, std::size_t col) {
  std::set<std::string> out;
  for (const auto& row : t.rows) {
    if (!row[col].is_null()) out.insert(row[col].group_key());
  }
  return out;
}

bool overlaps(const std::set<std::string>& a, const std::set<std::string>& b,
              double min_overlap) {
  if (a.empty() || b.empty()) return false;
  std::size_t shared = 0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& v : small) {
    if (large.count(v)) ++shared;
  }
  return static_cast<double>(shared) >=
         min_overlap * static_cast<double>(small.size());
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<Database> link_tables(const std::vector<DataTable>& tables,
                                  double min_overlap) {
  const std::size_t n = tables.size();
  UnionFind uf(n);
  std::vector<TableLink> links;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t ci = 0; ci < tables[i].columns.size(); ++ci) {
        for (std::size_t cj = 0; cj < tables[j].columns.size(); ++cj) {
          const auto& a = tables[i].columns[ci];
          const auto& b = tables[j].columns[cj];
          if (a.type != b.type) continue;
          if (norm_col_name(a.name) != norm_col_name(b.name)) continue;
          if (!overlaps(distinct_values(tables[i], ci),
                        distinct_values(tables[j], cj), min_overlap))
            continue;
          links.push_back({tables[i].name, a.name, tables[j].name, b.name});
          uf.unite(i, j);
        }
      }
    }
  }
  // components keyed by their smallest member index, in input order
  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) {
    components[uf.find(i)].push_back(i);
  }
  std::vector<std::vector<std::size_t>> ordered;
  for (auto& [root, members] : components) ordered.push_back(members);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  std::vector<Database> dbs;
  std::size_t index = 0;
  for (const auto& members : ordered) {
    Database db;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "db_%04zu", index++);
    db.name = buf;
    std::set<std::string> member_names;
    for (std::size_t m : members) {
      db.tables.push_back(tables[m]);
      member_names.insert(tables[m].name);
    }
    for (const auto& link : links) {
      if (member_names.count(link.table_a)) db.links.push_back(link);
    }
    dbs.push_back(std::move(db));
  }
  return dbs;
}

}  // namespace catsforge
