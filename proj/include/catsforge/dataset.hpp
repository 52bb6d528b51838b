#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "catsforge/sql_ast.hpp"
#include "catsforge/sql_exec.hpp"
#include "catsforge/table.hpp"

namespace catsforge {

// The JSONL unit of the dataset: {"id","db","sql","hardness",
// "table":{"header":[...],"rows":[[...]]},"reference"?}.
struct Example {
  std::string id;
  std::string db;
  std::string sql;  // canonical text form
  ResultTable table;
  std::optional<std::string> reference;
  Hardness hardness = Hardness::Easy;
};

class RecordError : public std::runtime_error {
 public:
  RecordError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

nlohmann::json table_to_json(const ResultTable& rt);
ResultTable table_from_json(const nlohmann::json& j);

nlohmann::json example_to_json(const Example& ex);
Example example_from_json(const nlohmann::json& j);

// Field-mapping adapter for the released dataset layout. Tolerates the
// common key variants (sql/query, table/result, text/description/...)
// and reports what it skipped through `warning`.
Example example_from_released_json(const nlohmann::json& j, std::string* warning);

// Streaming JSONL: on_record gets (1-based line, parsed json). Throws
// RecordError on unparsable lines unless skip_bad, in which case bad
// lines go to on_bad and reading continues. Returns the record count.
std::size_t for_each_jsonl(std::istream& in,
                           const std::function<void(std::size_t, const nlohmann::json&)>& on_record,
                           bool skip_bad = false,
                           const std::function<void(std::size_t, const std::string&)>& on_bad = {});

std::vector<Example> read_examples(std::istream& in, bool skip_bad = false,
                                   std::size_t* bad_count = nullptr);
std::vector<Example> read_examples_released(std::istream& in, bool skip_bad = false,
                                            std::size_t* bad_count = nullptr,
                                            std::ostream* warnings = nullptr);
void write_examples(std::ostream& out, const std::vector<Example>& examples);

// DataTable ingestion: CSV (first row is the header) and the JSON table
// form {"name","header":[...],"types"?:[...],"rows":[[...]]}.
DataTable table_from_csv(std::istream& in, const std::string& name);
DataTable data_table_from_json(const nlohmann::json& j);
nlohmann::json data_table_to_json(const DataTable& t);

// Database manifest: {"databases":[{"name","tables":[...],"links":[[a,ca,b,cb],...]}]}
nlohmann::json manifest_to_json(const std::vector<Database>& dbs);
std::vector<Database> manifest_from_json(const nlohmann::json& j);

struct SplitSpec {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
};

// Deterministic shuffle then exhaustive disjoint partition; bucket sizes
// are floor allocations with the remainder going to train.
struct SplitResult {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};
SplitResult split_indices(std::size_t n, const SplitSpec& spec);

}  // namespace catsforge
