#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "catsforge/sql_ast.hpp"
#include "catsforge/sql_exec.hpp"

namespace catsforge {

class MissingLexEntry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Surface phrases for SQL components. Keys: min max count sum avg, eq ne
// gt ge lt le like in not_in, and or, asc desc, union intersect except,
// add sub mul div. Shipped defaults are the Chinese phrases of the
// template baseline; the file format is KEY<TAB>PHRASE per line.
struct Lexicon {
  std::map<std::string, std::string> entries;

  const std::string& phrase(const std::string& key) const;
  static Lexicon defaults();
  static Lexicon load(const std::string& path);

  // Throws MissingLexEntry unless every component key is present and
  // non-empty; run at load time so rendering never fails midway.
  void check_total() const;
};

std::string lexicon_key(AggFn fn);
std::string lexicon_key(CmpOp op);
std::string lexicon_key(MathOp op);
std::string lexicon_key(Connector c);
std::string lexicon_key(SortDir d);
std::string lexicon_key(SetOp op);

// Slot templates with {name} placeholders; see TemplateSet::defaults()
// for the key list and the shipped sentence patterns.
struct TemplateSet {
  std::map<std::string, std::string> patterns;

  const std::string& pattern(const std::string& key) const;
  std::string fill(const std::string& key,
                   const std::map<std::string, std::string>& slots) const;
  static TemplateSet defaults();
  static TemplateSet load(const std::string& path);
};

// Renders the query: every column name, table name and literal value in
// the tree appears verbatim; components go through the lexicon.
std::string render_sql_description(const SqlAst& ast, const Lexicon& lex,
                                   const TemplateSet& ts);

// Enumerates every cell row by row; each cell string appears exactly once
// in row-major order, prefixed by its header.
std::string render_table_description(const ResultTable& rt, const TemplateSet& ts);

// SQL part followed by the table part under the joiner template.
std::string temp_describe(const SqlAst& ast, const ResultTable& rt, const Lexicon& lex,
                          const TemplateSet& ts);

}  // namespace catsforge
