#include "catsforge/sql_ast.hpp"

#include <algorithm>
#include <functional>

#include "catsforge/strings.hpp"

namespace catsforge {

const char* to_string(AggFn fn) {
  switch (fn) {
    case AggFn::Min: return "MIN";
    case AggFn::Max: return "MAX";
    case AggFn::Count: return "COUNT";
    case AggFn::Sum: return "SUM";
    case AggFn::Avg: return "AVG";
  }
  return "";
}

const char* to_string(MathOp op) {
  switch (op) {
    case MathOp::Add: return "+";
    case MathOp::Sub: return "-";
    case MathOp::Mul: return "*";
    case MathOp::Div: return "/";
  }
  return "";
}

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Like: return "LIKE";
    case CmpOp::In: return "IN";
    case CmpOp::NotIn: return "NOT IN";
  }
  return "";
}

const char* to_string(SetOp op) {
  switch (op) {
    case SetOp::Union: return "UNION";
    case SetOp::Intersect: return "INTERSECT";
    case SetOp::Except: return "EXCEPT";
  }
  return "";
}

const char* to_string(SortDir dir) { return dir == SortDir::Asc ? "ASC" : "DESC"; }

const char* to_string(Connector c) { return c == Connector::And ? "AND" : "OR"; }

const char* to_string(Hardness h) {
  switch (h) {
    case Hardness::Easy: return "easy";
    case Hardness::Medium: return "medium";
    case Hardness::Hard: return "hard";
    case Hardness::ExtraHard: return "extra";
  }
  return "";
}

std::optional<Hardness> hardness_from_string(std::string_view s) {
  const std::string t = to_lower_ascii(s);
  if (t == "easy") return Hardness::Easy;
  if (t == "medium") return Hardness::Medium;
  if (t == "hard") return Hardness::Hard;
  if (t == "extra" || t == "extra hard" || t == "extrahard") return Hardness::ExtraHard;
  return std::nullopt;
}

const char* to_string(SchemaError::Kind k) {
  switch (k) {
    case SchemaError::Kind::UnknownTable: return "UnknownTable";
    case SchemaError::Kind::UnknownColumn: return "UnknownColumn";
    case SchemaError::Kind::AmbiguousColumn: return "AmbiguousColumn";
    case SchemaError::Kind::TypeMismatch: return "TypeMismatch";
    case SchemaError::Kind::Malformed: return "Malformed";
    case SchemaError::Kind::BadSetOp: return "BadSetOp";
  }
  return "";
}

Literal Literal::number(double v) {
  Literal l;
  l.kind = Kind::Number;
  l.num = v;
  l.text = canonical_number(v);
  return l;
}

Literal Literal::string(std::string s) {
  Literal l;
  l.kind = Kind::String;
  l.text = std::move(s);
  return l;
}

Value Literal::to_value() const {
  if (kind == Kind::Number) return Value::number(num, text);
  return Value::text(text);
}

Condition clone(const Condition& cond) {
  Condition out;
  if (cond.is_leaf()) {
    const auto& leaf = cond.leaf();
    Condition::Leaf copy;
    copy.lhs = leaf.lhs;
    copy.op = leaf.op;
    copy.values = leaf.values;
    if (leaf.subquery) copy.subquery = std::make_unique<SqlAst>(clone(*leaf.subquery));
    out.v = std::move(copy);
  } else {
    Condition::Node copy;
    copy.conn = cond.node().conn;
    for (const auto& child : cond.node().children) copy.children.push_back(clone(child));
    out.v = std::move(copy);
  }
  return out;
}

SqlAst clone(const SqlAst& ast) {
  SqlAst out;
  if (ast.is_compound()) {
    SqlAst::Compound c;
    c.op = ast.compound->op;
    c.lhs = std::make_unique<SqlAst>(clone(*ast.compound->lhs));
    c.rhs = std::make_unique<SqlAst>(clone(*ast.compound->rhs));
    out.compound = std::move(c);
    return out;
  }
  out.select.select_items = ast.select.select_items;
  out.select.from_tables = ast.select.from_tables;
  if (ast.select.where) out.select.where = clone(*ast.select.where);
  out.select.group_by = ast.select.group_by;
  out.select.order_by = ast.select.order_by;
  out.select.limit = ast.select.limit;
  return out;
}

bool equal(const Condition& a, const Condition& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) {
    const auto& la = a.leaf();
    const auto& lb = b.leaf();
    if (!(la.lhs == lb.lhs) || la.op != lb.op || la.values != lb.values) return false;
    if (static_cast<bool>(la.subquery) != static_cast<bool>(lb.subquery)) return false;
    return !la.subquery || equal(*la.subquery, *lb.subquery);
  }
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.conn != nb.conn || na.children.size() != nb.children.size()) return false;
  for (std::size_t i = 0; i < na.children.size(); ++i) {
    if (!equal(na.children[i], nb.children[i])) return false;
  }
  return true;
}

bool equal(const SqlAst& a, const SqlAst& b) {
  if (a.is_compound() != b.is_compound()) return false;
  if (a.is_compound()) {
    return a.compound->op == b.compound->op && equal(*a.compound->lhs, *b.compound->lhs) &&
           equal(*a.compound->rhs, *b.compound->rhs);
  }
  const auto& sa = a.select;
  const auto& sb = b.select;
  if (sa.select_items != sb.select_items || sa.from_tables != sb.from_tables ||
      sa.group_by != sb.group_by || sa.order_by != sb.order_by || sa.limit != sb.limit)
    return false;
  if (sa.where.has_value() != sb.where.has_value()) return false;
  return !sa.where || equal(*sa.where, *sb.where);
}

std::string print_expr(const AggExpr& e) {
  std::string inner = e.lhs.display();
  if (e.op) inner += std::string(" ") + to_string(*e.op) + " " + e.rhs.display();
  if (e.agg) return std::string(to_string(*e.agg)) + "(" + inner + ")";
  return inner;
}

std::string print_literal(const Literal& lit) {
  if (lit.kind == Literal::Kind::Number) return canonical_number(lit.num);
  std::string out = "'";
  for (char c : lit.text) {
    out.push_back(c);
    if (c == '\'') out.push_back('\'');
  }
  out.push_back('\'');
  return out;
}

std::string print_condition(const Condition& c) {
  if (c.is_leaf()) {
    const auto& leaf = c.leaf();
    std::string out = print_expr(leaf.lhs);
    out += " ";
    out += to_string(leaf.op);
    out += " ";
    if (leaf.subquery) {
      out += "(" + print_sql(*leaf.subquery) + ")";
    } else if (leaf.op == CmpOp::In || leaf.op == CmpOp::NotIn) {
      std::vector<std::string> parts;
      for (const auto& v : leaf.values) parts.push_back(print_literal(v));
      out += "(" + join(parts, ", ") + ")";
    } else {
      out += print_literal(leaf.values.front());
    }
    return out;
  }
  std::vector<std::string> parts;
  for (const auto& child : c.node().children) {
    std::string s = print_condition(child);
    if (!child.is_leaf()) s = "(" + s + ")";
    parts.push_back(std::move(s));
  }
  return join(parts, std::string(" ") + to_string(c.node().conn) + " ");
}

std::string print_sql(const SqlAst& ast) {
  if (ast.is_compound()) {
    std::string lhs = print_sql(*ast.compound->lhs);
    std::string rhs = print_sql(*ast.compound->rhs);
    if (ast.compound->rhs->is_compound()) rhs = "(" + rhs + ")";
    return lhs + " " + to_string(ast.compound->op) + " " + rhs;
  }
  const auto& s = ast.select;
  std::vector<std::string> items;
  for (const auto& item : s.select_items) items.push_back(print_expr(item));
  std::string out = "SELECT " + join(items, ", ") + " FROM " + join(s.from_tables, ", ");
  if (s.where) out += " WHERE " + print_condition(*s.where);
  if (!s.group_by.empty()) {
    std::vector<std::string> cols;
    for (const auto& c : s.group_by) cols.push_back(c.display());
    out += " GROUP BY " + join(cols, ", ");
  }
  if (s.order_by) {
    out += " ORDER BY " + print_expr(s.order_by->first) + " " + to_string(s.order_by->second);
  }
  if (s.limit) out += " LIMIT " + std::to_string(*s.limit);
  return out;
}

namespace {

void walk_leaves(const Condition& c, const std::function<void(const Condition::Leaf&)>& fn) {
  if (c.is_leaf()) {
    fn(c.leaf());
    return;
  }
  for (const auto& child : c.node().children) walk_leaves(child, fn);
}

int count_connectors(const Condition& c, Connector which) {
  if (c.is_leaf()) return 0;
  int n = c.node().conn == which ? static_cast<int>(c.node().children.size()) - 1 : 0;
  for (const auto& child : c.node().children) n += count_connectors(child, which);
  return n;
}

const SelectCore& leftmost_core(const SqlAst& ast, int& set_ops) {
  const SqlAst* cur = &ast;
  while (cur->is_compound()) {
    ++set_ops;
    cur = cur->compound->lhs.get();
  }
  return cur->select;
}

int agg_like_count(const SelectCore& core) {
  int n = 0;
  const auto count_expr = [&](const AggExpr& e) {
    if (e.agg) ++n;
    if (e.op) ++n;  // arithmetic counts like an aggregation component
  };
  for (const auto& item : core.select_items) count_expr(item);
  if (core.where) {
    walk_leaves(*core.where, [&](const Condition::Leaf& leaf) { count_expr(leaf.lhs); });
  }
  if (core.order_by) count_expr(core.order_by->first);
  return n;
}

}  // namespace

HardnessCounts hardness_counts(const SqlAst& ast) {
  HardnessCounts counts;
  int set_ops = 0;
  const SelectCore& core = leftmost_core(ast, set_ops);

  if (core.where) ++counts.clause_components;
  if (!core.group_by.empty()) ++counts.clause_components;
  if (core.order_by) ++counts.clause_components;
  if (core.limit) ++counts.clause_components;
  counts.clause_components += static_cast<int>(core.from_tables.size()) - 1;

  int where_leaves = 0;
  int subqueries = 0;
  if (core.where) {
    counts.clause_components += count_connectors(*core.where, Connector::Or);
    walk_leaves(*core.where, [&](const Condition::Leaf& leaf) {
      ++where_leaves;
      if (leaf.op == CmpOp::Like) ++counts.clause_components;
      if (leaf.subquery) ++subqueries;
    });
  }
  counts.nested = set_ops + subqueries;

  if (agg_like_count(core) > 1) ++counts.extras;
  if (core.select_items.size() > 1) ++counts.extras;
  if (where_leaves >= 2) ++counts.extras;
  if (core.group_by.size() > 1) ++counts.extras;
  return counts;
}

Hardness classify_hardness(const SqlAst& ast) {
  const HardnessCounts c = hardness_counts(ast);
  const int comp = c.clause_components;
  const int nest = c.nested;
  const int extra = c.extras;
  if (comp <= 1 && extra == 0 && nest == 0) return Hardness::Easy;
  if ((extra <= 2 && comp <= 1 && nest == 0) || (comp <= 2 && extra < 2 && nest == 0))
    return Hardness::Medium;
  if ((extra > 2 && comp <= 2 && nest == 0) ||
      (comp > 2 && comp <= 3 && extra <= 2 && nest == 0) ||
      (comp <= 1 && extra == 0 && nest <= 1))
    return Hardness::Hard;
  return Hardness::ExtraHard;
}

namespace {

struct Resolver {
  const Database& db;
  const SelectCore& core;
  std::vector<SchemaError>& errors;

  // (table, column) or nullopt after reporting
  std::optional<std::pair<const DataTable*, const Column*>> resolve(const ColumnRef& ref) const {
    if (!ref.table.empty()) {
      if (std::find(core.from_tables.begin(), core.from_tables.end(), ref.table) ==
          core.from_tables.end()) {
        errors.push_back({SchemaError::Kind::UnknownTable,
                          "qualifier '" + ref.table + "' not in FROM clause"});
        return std::nullopt;
      }
      const DataTable* t = db.find_table(ref.table);
      if (!t) {
        errors.push_back({SchemaError::Kind::UnknownTable, "unknown table '" + ref.table + "'"});
        return std::nullopt;
      }
      const std::size_t idx = t->column_index(ref.column);
      if (idx == static_cast<std::size_t>(-1)) {
        errors.push_back({SchemaError::Kind::UnknownColumn,
                          "unknown column '" + ref.display() + "'"});
        return std::nullopt;
      }
      return std::make_pair(t, &t->columns[idx]);
    }
    const DataTable* found_table = nullptr;
    const Column* found_col = nullptr;
    int matches = 0;
    for (const auto& table_name : core.from_tables) {
      const DataTable* t = db.find_table(table_name);
      if (!t) continue;
      const std::size_t idx = t->column_index(ref.column);
      if (idx != static_cast<std::size_t>(-1)) {
        ++matches;
        found_table = t;
        found_col = &t->columns[idx];
      }
    }
    if (matches == 0) {
      errors.push_back({SchemaError::Kind::UnknownColumn,
                        "unknown column '" + ref.column + "'"});
      return std::nullopt;
    }
    if (matches > 1) {
      errors.push_back({SchemaError::Kind::AmbiguousColumn,
                        "column '" + ref.column + "' matches several FROM tables"});
      return std::nullopt;
    }
    return std::make_pair(found_table, found_col);
  }

  std::optional<CType> expr_type(const AggExpr& e) const {
    std::optional<CType> base;
    if (e.op) {
      const auto l = resolve(e.lhs);
      const auto r = resolve(e.rhs);
      if (!l || !r) return std::nullopt;
      if (l->second->type != CType::Number || r->second->type != CType::Number) {
        errors.push_back({SchemaError::Kind::TypeMismatch,
                          "arithmetic over non-Number column in '" + print_expr(e) + "'"});
        return std::nullopt;
      }
      base = CType::Number;
    } else {
      const auto l = resolve(e.lhs);
      if (!l) return std::nullopt;
      base = l->second->type;
    }
    if (!e.agg) return base;
    switch (*e.agg) {
      case AggFn::Count: return CType::Number;
      case AggFn::Sum:
      case AggFn::Avg:
        if (*base != CType::Number) {
          errors.push_back({SchemaError::Kind::TypeMismatch,
                            std::string(to_string(*e.agg)) + " over non-Number column in '" +
                                print_expr(e) + "'"});
          return std::nullopt;
        }
        return CType::Number;
      case AggFn::Min:
      case AggFn::Max: return base;
    }
    return base;
  }
};

bool literal_compatible(CType col, const Literal& lit) {
  switch (col) {
    case CType::Number: return lit.kind == Literal::Kind::Number ||
                               parse_number(lit.text).has_value();
    case CType::Text: return lit.kind == Literal::Kind::String;
    case CType::Time: return lit.kind == Literal::Kind::String &&
                             parse_time(lit.text).has_value();
    case CType::Bool: return lit.kind == Literal::Kind::String &&
                             parse_bool(lit.text).has_value();
  }
  return false;
}

int select_arity(const SqlAst& ast) {
  const SqlAst* cur = &ast;
  while (cur->is_compound()) cur = cur->compound->lhs.get();
  return static_cast<int>(cur->select.select_items.size());
}

void validate_core(const SqlAst& ast, const Database& db, std::vector<SchemaError>& errors);

void validate_condition(const Condition& cond, const Resolver& resolver, const Database& db,
                        std::vector<SchemaError>& errors) {
  if (!cond.is_leaf()) {
    if (cond.node().children.size() < 2) {
      errors.push_back({SchemaError::Kind::Malformed, "connector node with fewer than 2 children"});
    }
    for (const auto& child : cond.node().children) {
      validate_condition(child, resolver, db, errors);
    }
    return;
  }
  const auto& leaf = cond.leaf();
  if (leaf.lhs.agg) {
    errors.push_back({SchemaError::Kind::Malformed,
                      "aggregate not allowed in WHERE: '" + print_expr(leaf.lhs) + "'"});
  }
  const auto lhs_type = resolver.expr_type(leaf.lhs);
  if (leaf.subquery) {
    if (select_arity(*leaf.subquery) != 1) {
      errors.push_back({SchemaError::Kind::Malformed, "subquery must select exactly one column"});
    }
    validate_core(*leaf.subquery, db, errors);
    return;
  }
  if (leaf.values.empty()) {
    errors.push_back({SchemaError::Kind::Malformed, "condition without right-hand side"});
    return;
  }
  if (leaf.op == CmpOp::Like) {
    if (lhs_type && *lhs_type != CType::Text) {
      errors.push_back({SchemaError::Kind::TypeMismatch, "LIKE over non-Text column"});
    }
    if (leaf.values.front().kind != Literal::Kind::String) {
      errors.push_back({SchemaError::Kind::TypeMismatch, "LIKE pattern must be a string literal"});
    }
    return;
  }
  if (lhs_type) {
    for (const auto& value : leaf.values) {
      if (!literal_compatible(*lhs_type, value)) {
        errors.push_back({SchemaError::Kind::TypeMismatch,
                          "literal " + print_literal(value) + " not comparable with " +
                              ctype_name(*lhs_type) + " column"});
      }
    }
  }
}

void validate_core(const SqlAst& ast, const Database& db, std::vector<SchemaError>& errors) {
  if (ast.is_compound()) {
    validate_core(*ast.compound->lhs, db, errors);
    validate_core(*ast.compound->rhs, db, errors);
    if (select_arity(*ast.compound->lhs) != select_arity(*ast.compound->rhs)) {
      errors.push_back({SchemaError::Kind::BadSetOp,
                        "set-operation operands select different column counts"});
    }
    return;
  }
  const auto& core = ast.select;
  if (core.select_items.empty()) {
    errors.push_back({SchemaError::Kind::Malformed, "empty select list"});
    return;
  }
  if (core.from_tables.empty()) {
    errors.push_back({SchemaError::Kind::Malformed, "empty FROM clause"});
    return;
  }
  for (const auto& name : core.from_tables) {
    if (!db.find_table(name)) {
      errors.push_back({SchemaError::Kind::UnknownTable, "unknown table '" + name + "'"});
    }
    if (std::count(core.from_tables.begin(), core.from_tables.end(), name) > 1) {
      errors.push_back({SchemaError::Kind::Malformed, "table '" + name + "' listed twice in FROM"});
      return;
    }
  }
  Resolver resolver{db, core, errors};
  for (const auto& item : core.select_items) resolver.expr_type(item);
  for (const auto& col : core.group_by) resolver.resolve(col);

  const bool grouped = !core.group_by.empty();
  const bool any_agg = std::any_of(core.select_items.begin(), core.select_items.end(),
                                   [](const AggExpr& e) { return e.agg.has_value(); });
  const auto is_group_key = [&](const AggExpr& e) {
    return !e.agg && !e.op &&
           std::any_of(core.group_by.begin(), core.group_by.end(), [&](const ColumnRef& g) {
             return g.column == e.lhs.column &&
                    (g.table == e.lhs.table || g.table.empty() || e.lhs.table.empty());
           });
  };
  if (grouped) {
    for (const auto& item : core.select_items) {
      if (!item.agg && !is_group_key(item)) {
        errors.push_back({SchemaError::Kind::Malformed,
                          "'" + print_expr(item) + "' is neither aggregated nor a GROUP BY key"});
      }
    }
  } else if (any_agg) {
    for (const auto& item : core.select_items) {
      if (!item.agg) {
        errors.push_back({SchemaError::Kind::Malformed,
                          "bare column '" + print_expr(item) +
                              "' mixed with aggregates requires GROUP BY"});
      }
    }
  }
  if (core.where) validate_condition(*core.where, resolver, db, errors);
  if (core.order_by) {
    const auto& expr = core.order_by->first;
    resolver.expr_type(expr);
    if (expr.agg && !grouped && !any_agg) {
      errors.push_back({SchemaError::Kind::Malformed, "aggregate ORDER BY on a non-aggregated query"});
    }
    if (grouped && !expr.agg && !is_group_key(expr)) {
      errors.push_back({SchemaError::Kind::Malformed,
                        "ORDER BY '" + print_expr(expr) + "' is neither aggregated nor a GROUP BY key"});
    }
    if (!grouped && any_agg && !expr.agg) {
      errors.push_back({SchemaError::Kind::Malformed,
                        "bare ORDER BY column on an aggregated query"});
    }
  }
  if (core.limit && *core.limit < 0) {
    errors.push_back({SchemaError::Kind::Malformed, "negative LIMIT"});
  }
}

}  // namespace

std::vector<SchemaError> validate_schema(const SqlAst& ast, const Database& db) {
  std::vector<SchemaError> errors;
  validate_core(ast, db, errors);
  return errors;
}

}  // namespace catsforge
