#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "catsforge/sql_ast.hpp"
#include "catsforge/table.hpp"

namespace catsforge {

struct ResultTable {
  std::vector<std::string> headers;  // rendered select expressions
  std::vector<std::vector<Value>> rows;
};

struct ExecOptions {
  int avg_decimals = 2;  // canonical rendering precision for AVG cells
};

class ExecError : public std::runtime_error {
 public:
  enum class Kind { DivisionByZero, NoJoinPath, TypeError };

  ExecError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Evaluates the query over the database. Semantics of the subset:
//   - multi-table FROM is an implicit equi-join over the database links
//     between the listed tables (NoJoinPath when they are not connected);
//   - WHERE uses three-valued null handling collapsed to false;
//   - GROUP BY partitions by first occurrence, aggregates skip nulls
//     (COUNT of an empty set is 0, other aggregates yield null);
//   - ORDER BY sorts with nulls last and original row index as tie-break;
//   - UNION/INTERSECT/EXCEPT use set semantics over whole-row equality.
// Row order without ORDER BY is the input scan order.
ResultTable execute(const SqlAst& ast, const Database& db, const ExecOptions& opts = {});

inline bool is_empty(const ResultTable& rt) { return rt.rows.empty(); }

}  // namespace catsforge
