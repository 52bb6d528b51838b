#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "catsforge/table.hpp"
#include "catsforge/value.hpp"

namespace catsforge {

enum class AggFn { Min, Max, Count, Sum, Avg };
enum class MathOp { Add, Sub, Mul, Div };
enum class CmpOp { Eq, Ne, Gt, Ge, Lt, Le, Like, In, NotIn };
enum class SetOp { Union, Intersect, Except };
enum class SortDir { Asc, Desc };
enum class Connector { And, Or };

enum class Hardness { Easy, Medium, Hard, ExtraHard };

const char* to_string(AggFn fn);
const char* to_string(MathOp op);
const char* to_string(CmpOp op);
const char* to_string(SetOp op);
const char* to_string(SortDir dir);
const char* to_string(Connector c);
const char* to_string(Hardness h);
std::optional<Hardness> hardness_from_string(std::string_view s);

struct ColumnRef {
  std::string table;  // optional qualifier; empty when unqualified
  std::string column;

  bool operator==(const ColumnRef&) const = default;
  std::string display() const { return table.empty() ? column : table + "." + column; }
};

// C | AGG(C) | C mathop C, the only expression forms in the subset.
struct AggExpr {
  std::optional<AggFn> agg;
  ColumnRef lhs;
  std::optional<MathOp> op;
  ColumnRef rhs;  // meaningful only when op is set

  bool operator==(const AggExpr&) const = default;
};

struct Literal {
  enum class Kind { Number, String };
  Kind kind = Kind::String;
  double num = 0.0;
  std::string text;  // unquoted surface form

  static Literal number(double v);
  static Literal string(std::string s);
  bool operator==(const Literal&) const = default;
  Value to_value() const;
};

struct SqlAst;

struct Condition {
  struct Leaf {
    AggExpr lhs;
    CmpOp op = CmpOp::Eq;
    std::vector<Literal> values;        // 1 for comparisons, >=1 for IN lists
    std::unique_ptr<SqlAst> subquery;   // alternative right-hand side
  };
  struct Node {
    Connector conn = Connector::And;
    std::vector<Condition> children;  // always >= 2
  };

  // defined after SqlAst below; the variant is recursive through it
  Condition();
  explicit Condition(Leaf leaf);
  explicit Condition(Node node);

  std::variant<Leaf, Node> v;

  bool is_leaf() const { return std::holds_alternative<Leaf>(v); }
  const Leaf& leaf() const { return std::get<Leaf>(v); }
  Leaf& leaf() { return std::get<Leaf>(v); }
  const Node& node() const { return std::get<Node>(v); }
  Node& node() { return std::get<Node>(v); }
};

struct SelectCore {
  std::vector<AggExpr> select_items;      // non-empty
  std::vector<std::string> from_tables;   // non-empty
  std::optional<Condition> where;
  std::vector<ColumnRef> group_by;
  std::optional<std::pair<AggExpr, SortDir>> order_by;
  std::optional<long long> limit;
};

struct SqlAst {
  struct Compound {
    SetOp op;
    std::unique_ptr<SqlAst> lhs;
    std::unique_ptr<SqlAst> rhs;
  };

  std::optional<Compound> compound;  // engaged for UNION/INTERSECT/EXCEPT
  SelectCore select;                 // engaged otherwise

  bool is_compound() const { return compound.has_value(); }
};

inline Condition::Condition() : v(Leaf{}) {}
inline Condition::Condition(Leaf leaf) : v(std::move(leaf)) {}
inline Condition::Condition(Node node) : v(std::move(node)) {}

SqlAst clone(const SqlAst& ast);
Condition clone(const Condition& cond);
bool equal(const SqlAst& a, const SqlAst& b);
bool equal(const Condition& a, const Condition& b);

// Canonical single-line rendering; parse_sql(print_sql(a)) == a structurally.
std::string print_sql(const SqlAst& ast);
std::string print_expr(const AggExpr& e);
std::string print_condition(const Condition& c);
std::string print_literal(const Literal& lit);

// Spider-style component counting over four levels. The exact thresholds
// are documented in docs/hardness.md and exposed via HardnessCounts for
// auditability.
struct HardnessCounts {
  int clause_components = 0;  // WHERE/GROUP BY/ORDER BY/LIMIT/extra FROM tables/OR/LIKE
  int nested = 0;             // set-op branches + subquery conditions
  int extras = 0;             // >1 agg, >1 select item, >=2 where conds, >1 group col
};

HardnessCounts hardness_counts(const SqlAst& ast);
Hardness classify_hardness(const SqlAst& ast);

struct SchemaError {
  enum class Kind {
    UnknownTable,
    UnknownColumn,
    AmbiguousColumn,
    TypeMismatch,
    Malformed,  // bare column outside GROUP BY, aggregate in WHERE, ...
    BadSetOp,   // operand arity mismatch
  };
  Kind kind;
  std::string message;
};

const char* to_string(SchemaError::Kind k);

// Empty result means every reference resolves and typing constraints hold:
// arithmetic and SUM/AVG over Number columns, LIKE over Text, comparable
// literal/column pairs, grouped queries projecting only group keys or
// aggregates, set-op operands with equal arity.
std::vector<SchemaError> validate_schema(const SqlAst& ast, const Database& db);

}  // namespace catsforge
