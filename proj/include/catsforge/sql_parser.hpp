#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "catsforge/sql_ast.hpp"

namespace catsforge {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string message, std::size_t offset, std::vector<std::string> expected);

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

// SQL that is valid elsewhere but outside this subset (JOIN ON, HAVING,
// DISTINCT, DML, ...).
class UnsupportedFeature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses the canonical single-line SQL form. Keywords are matched
// case-insensitively; identifiers (including CJK names) are kept verbatim;
// string literals are single-quoted with '' as the escape.
SqlAst parse_sql(std::string_view text);

// True when `name` lexes back as a single identifier token (no operator
// characters or spaces, does not start with a digit, not a keyword). The
// synthesizer only grounds slots in such names so queries round-trip.
bool lexes_as_identifier(std::string_view name);

}  // namespace catsforge
