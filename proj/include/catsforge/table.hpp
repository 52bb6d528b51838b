#pragma once

#include <regex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "catsforge/value.hpp"

namespace catsforge {

struct Column {
  std::string name;
  CType type = CType::Text;
};

struct DataTable {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<Value>> rows;

  std::size_t column_index(std::string_view col_name) const;
  bool rectangular() const;
};

struct TableLink {
  std::string table_a;
  std::string col_a;
  std::string table_b;
  std::string col_b;

  bool operator==(const TableLink&) const = default;
};

struct Database {
  std::string name;
  std::vector<DataTable> tables;
  std::vector<TableLink> links;

  const DataTable* find_table(std::string_view table_name) const;
};

struct CleaningReport {
  std::size_t input_count = 0;
  std::size_t kept_count = 0;
  std::vector<std::pair<std::string, int>> rejected;  // (table name, rule 1..4)
};

class EmptyTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Assigns each column the type the majority (>50%) of its non-empty cells
// parse as; ties and no-majority fall back to Text. Cells are re-parsed
// under the assigned type.
DataTable infer_column_types(const DataTable& raw);

// Rule-based table filter. Rules, applied in order, reject a table when:
//   1. a header or cell contains a blacklisted word,
//   2. fewer than 30% of its columns are Text-typed,
//   3. it has fewer than 2 columns or fewer than 2 rows,
//   4. a single cell string fills more than 50% of the body cells.
// Kept tables come back with inferred column types.
std::pair<std::vector<DataTable>, CleaningReport> clean_tables(
    const std::vector<DataTable>& raws, const std::vector<std::string>& blacklist);

struct SensitiveRule {
  std::string category;     // e.g. ID_NUMBER
  std::string pattern_src;  // anchored ECMAScript regex over the whole cell
  std::regex pattern;
  std::string placeholder;  // e.g. <ID_NUMBER>
};

std::vector<SensitiveRule> default_sensitive_rules();
std::vector<SensitiveRule> load_sensitive_rules(const std::string& path);

// Replaces every cell fully matching a rule with the rule's placeholder.
DataTable sanitize_sensitive(const DataTable& table,
                             const std::vector<SensitiveRule>& rules);

// Groups tables into databases: two tables join when they share a column
// name (case-insensitively, whitespace ignored) of the same type whose
// distinct-value sets overlap by at least min_overlap of the smaller set.
// Connected components become databases; shared columns become links.
std::vector<Database> link_tables(const std::vector<DataTable>& tables,
                                  double min_overlap = 0.5);

std::vector<std::string> load_blacklist(const std::string& path);

}  // namespace catsforge
