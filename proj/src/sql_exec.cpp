#include "catsforge/sql_exec.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include "catsforge/strings.hpp"

namespace catsforge {

namespace {

struct Binding {
  std::string table;
  std::string column;
  CType type;
};

// One FROM clause resolved to a flat row set over the joined tables.
struct WorkingSet {
  std::vector<Binding> bindings;
  std::vector<std::vector<const Value*>> rows;
};

std::size_t resolve_binding(const WorkingSet& ws, const ColumnRef& ref) {
  for (std::size_t i = 0; i < ws.bindings.size(); ++i) {
    const auto& b = ws.bindings[i];
    if (b.column != ref.column) continue;
    if (ref.table.empty() || ref.table == b.table) return i;
  }
  throw ExecError(ExecError::Kind::TypeError, "unresolved column '" + ref.display() + "'");
}

WorkingSet build_working_set(const SelectCore& core, const Database& db) {
  WorkingSet ws;
  std::vector<const DataTable*> tables;
  for (const auto& name : core.from_tables) {
    const DataTable* t = db.find_table(name);
    if (!t) throw ExecError(ExecError::Kind::TypeError, "unknown table '" + name + "'");
    tables.push_back(t);
    for (const auto& col : t->columns) ws.bindings.push_back({t->name, col.name, col.type});
  }
  if (tables.size() == 1) {
    for (const auto& row : tables[0]->rows) {
      std::vector<const Value*> cells;
      cells.reserve(row.size());
      for (const auto& v : row) cells.push_back(&v);
      ws.rows.push_back(std::move(cells));
    }
    return ws;
  }

  // join conditions: database links with both endpoints in the FROM list
  struct JoinCond {
    std::size_t col_a;
    std::size_t col_b;
    std::size_t table_a;
    std::size_t table_b;
  };
  const auto table_pos = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < core.from_tables.size(); ++i) {
      if (core.from_tables[i] == name) return i;
    }
    return static_cast<std::size_t>(-1);
  };
  std::vector<std::size_t> offsets(tables.size(), 0);
  for (std::size_t i = 1; i < tables.size(); ++i) {
    offsets[i] = offsets[i - 1] + tables[i - 1]->columns.size();
  }
  std::vector<JoinCond> conds;
  std::vector<std::vector<std::size_t>> adj(tables.size());
  for (const auto& link : db.links) {
    const std::size_t a = table_pos(link.table_a);
    const std::size_t b = table_pos(link.table_b);
    if (a == static_cast<std::size_t>(-1) || b == static_cast<std::size_t>(-1) || a == b)
      continue;
    const std::size_t ca = tables[a]->column_index(link.col_a);
    const std::size_t cb = tables[b]->column_index(link.col_b);
    if (ca == static_cast<std::size_t>(-1) || cb == static_cast<std::size_t>(-1)) continue;
    conds.push_back({offsets[a] + ca, offsets[b] + cb, a, b});
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  // all FROM tables must sit in one linked component
  std::vector<bool> seen(tables.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    for (std::size_t next : adj[cur]) {
      if (!seen[next]) {
        seen[next] = true;
        stack.push_back(next);
      }
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw ExecError(ExecError::Kind::NoJoinPath,
                    "FROM tables are not linked in database '" + db.name + "'");
  }

  // filtered cross product, first table major
  std::vector<std::size_t> idx(tables.size(), 0);
  const bool any_empty = std::any_of(tables.begin(), tables.end(),
                                     [](const DataTable* t) { return t->rows.empty(); });
  if (any_empty) return ws;
  while (true) {
    std::vector<const Value*> cells;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      for (const auto& v : tables[t]->rows[idx[t]]) cells.push_back(&v);
    }
    bool keep = true;
    for (const auto& c : conds) {
      const Value& a = *cells[c.col_a];
      const Value& b = *cells[c.col_b];
      const auto cmp = compare_values(a, b);
      if (!cmp || *cmp != 0) {
        keep = false;
        break;
      }
    }
    if (keep) ws.rows.push_back(std::move(cells));
    std::size_t t = tables.size();
    while (t > 0) {
      --t;
      if (++idx[t] < tables[t]->rows.size()) break;
      idx[t] = 0;
      if (t == 0) return ws;
    }
  }
}

class Evaluator {
 public:
  Evaluator(const Database& db, const ExecOptions& opts) : db_(db), opts_(opts) {}

  ResultTable run(const SqlAst& ast) {
    if (ast.is_compound()) return run_compound(ast);
    return run_core(ast.select);
  }

 private:
  static std::string row_key(const std::vector<Value>& row) {
    std::string key;
    for (const auto& v : row) {
      key += v.group_key();
      key.push_back('\x1f');
    }
    return key;
  }

  ResultTable run_compound(const SqlAst& ast) {
    ResultTable lhs = run(*ast.compound->lhs);
    ResultTable rhs = run(*ast.compound->rhs);
    if (!lhs.rows.empty() && !rhs.rows.empty() &&
        lhs.rows.front().size() != rhs.rows.front().size()) {
      throw ExecError(ExecError::Kind::TypeError, "set-operation arity mismatch");
    }
    ResultTable out;
    out.headers = lhs.headers;
    std::set<std::string> rhs_keys;
    for (const auto& row : rhs.rows) rhs_keys.insert(row_key(row));
    std::set<std::string> emitted;
    const auto emit_unique = [&](const std::vector<Value>& row, bool want_in_rhs,
                                 bool need_rhs_check) {
      const std::string key = row_key(row);
      if (emitted.count(key)) return;
      if (need_rhs_check && (rhs_keys.count(key) != 0) != want_in_rhs) return;
      emitted.insert(key);
      out.rows.push_back(row);
    };
    switch (ast.compound->op) {
      case SetOp::Union:
        for (const auto& row : lhs.rows) emit_unique(row, false, false);
        for (const auto& row : rhs.rows) emit_unique(row, false, false);
        break;
      case SetOp::Intersect:
        for (const auto& row : lhs.rows) emit_unique(row, true, true);
        break;
      case SetOp::Except:
        for (const auto& row : lhs.rows) emit_unique(row, false, true);
        break;
    }
    return out;
  }

  Value eval_expr_base(const WorkingSet& ws, const std::vector<const Value*>& row,
                       const AggExpr& e) {
    const Value& lhs = *row[resolve_binding(ws, e.lhs)];
    if (!e.op) return lhs;
    const Value& rhs = *row[resolve_binding(ws, e.rhs)];
    if (lhs.is_null() || rhs.is_null()) return Value::null();
    if (lhs.type() != CType::Number || rhs.type() != CType::Number) {
      throw ExecError(ExecError::Kind::TypeError, "arithmetic over non-numeric cells");
    }
    const double a = lhs.num();
    const double b = rhs.num();
    switch (*e.op) {
      case MathOp::Add: return Value::number(a + b);
      case MathOp::Sub: return Value::number(a - b);
      case MathOp::Mul: return Value::number(a * b);
      case MathOp::Div:
        if (b == 0.0) throw ExecError(ExecError::Kind::DivisionByZero, "division by zero");
        return Value::number(a / b);
    }
    return Value::null();
  }

  Value aggregate(AggFn fn, const std::vector<Value>& values) {
    std::vector<const Value*> present;
    for (const auto& v : values) {
      if (!v.is_null()) present.push_back(&v);
    }
    if (fn == AggFn::Count) return Value::number(static_cast<double>(present.size()));
    if (present.empty()) return Value::null();
    switch (fn) {
      case AggFn::Min:
      case AggFn::Max: {
        const Value* best = present.front();
        for (const Value* v : present) {
          const auto cmp = compare_values(*v, *best);
          if (cmp && ((fn == AggFn::Min && *cmp < 0) || (fn == AggFn::Max && *cmp > 0))) {
            best = v;
          }
        }
        return *best;
      }
      case AggFn::Sum: {
        double total = 0;
        for (const Value* v : present) total += v->num();
        return Value::number(total);
      }
      case AggFn::Avg: {
        double total = 0;
        for (const Value* v : present) total += v->num();
        const double avg = total / static_cast<double>(present.size());
        return Value::number(avg, canonical_number(avg, opts_.avg_decimals));
      }
      case AggFn::Count: break;
    }
    return Value::null();
  }

  // prepared condition: subquery leaves are materialized once
  struct PreparedLeaf {
    const Condition::Leaf* leaf;
    std::vector<Value> sub_values;  // single-column subquery results
    bool scalar = false;
  };

  void prepare(const Condition& cond, std::vector<PreparedLeaf>& out) {
    if (!cond.is_leaf()) {
      for (const auto& child : cond.node().children) prepare(child, out);
      return;
    }
    const auto& leaf = cond.leaf();
    PreparedLeaf p;
    p.leaf = &leaf;
    if (leaf.subquery) {
      const ResultTable sub = run(*leaf.subquery);
      if (!sub.rows.empty() && sub.rows.front().size() != 1) {
        throw ExecError(ExecError::Kind::TypeError, "subquery must yield one column");
      }
      for (const auto& row : sub.rows) p.sub_values.push_back(row.front());
      p.scalar = leaf.op != CmpOp::In && leaf.op != CmpOp::NotIn;
      if (p.scalar && p.sub_values.size() > 1) {
        throw ExecError(ExecError::Kind::TypeError,
                        "scalar subquery returned " + std::to_string(p.sub_values.size()) +
                            " rows");
      }
    }
    out.push_back(std::move(p));
  }

  static bool like_match(const std::string& value, const std::string& pattern) {
    std::string_view p = pattern;
    bool prefix = false, suffix = false;
    if (!p.empty() && p.front() == '%') {
      suffix = true;  // matches anywhere up to the end
      p.remove_prefix(1);
    }
    if (!p.empty() && p.back() == '%') {
      prefix = true;
      p.remove_suffix(1);
    }
    if (prefix && suffix) return contains(value, p);
    if (suffix) return value.size() >= p.size() && value.ends_with(p);
    if (prefix) return value.size() >= p.size() && value.starts_with(p);
    return value == p;
  }

  bool eval_leaf(const WorkingSet& ws, const std::vector<const Value*>& row,
                 const PreparedLeaf& p) {
    const auto& leaf = *p.leaf;
    if (leaf.lhs.agg) {
      throw ExecError(ExecError::Kind::TypeError, "aggregate in WHERE");
    }
    const Value lhs = eval_expr_base(ws, row, leaf.lhs);
    if (lhs.is_null()) return false;
    if (leaf.op == CmpOp::Like) {
      return like_match(lhs.str(), leaf.values.front().text);
    }
    if (leaf.op == CmpOp::In || leaf.op == CmpOp::NotIn) {
      bool member = false;
      if (leaf.subquery) {
        for (const auto& v : p.sub_values) {
          const auto cmp = compare_values(lhs, v);
          if (cmp && *cmp == 0) {
            member = true;
            break;
          }
        }
      } else {
        for (const auto& lit : leaf.values) {
          const auto cmp = compare_values(lhs, lit.to_value());
          if (cmp && *cmp == 0) {
            member = true;
            break;
          }
        }
      }
      return leaf.op == CmpOp::In ? member : !member;
    }
    Value rhs;
    if (leaf.subquery) {
      if (p.sub_values.empty()) return false;
      rhs = p.sub_values.front();
    } else {
      rhs = leaf.values.front().to_value();
    }
    const auto cmp = compare_values(lhs, rhs);
    if (!cmp) return false;
    switch (leaf.op) {
      case CmpOp::Eq: return *cmp == 0;
      case CmpOp::Ne: return *cmp != 0;
      case CmpOp::Gt: return *cmp > 0;
      case CmpOp::Ge: return *cmp >= 0;
      case CmpOp::Lt: return *cmp < 0;
      case CmpOp::Le: return *cmp <= 0;
      default: return false;
    }
  }

  bool eval_condition(const WorkingSet& ws, const std::vector<const Value*>& row,
                      const Condition& cond, const std::vector<PreparedLeaf>& prepared,
                      std::size_t& cursor) {
    if (cond.is_leaf()) {
      return eval_leaf(ws, row, prepared[cursor++]);
    }
    bool result = cond.node().conn == Connector::And;
    for (const auto& child : cond.node().children) {
      const bool value = eval_condition(ws, row, child, prepared, cursor);
      if (cond.node().conn == Connector::And) {
        result = result && value;
      } else {
        result = result || value;
      }
    }
    return result;
  }

  ResultTable run_core(const SelectCore& core) {
    WorkingSet ws = build_working_set(core, db_);
    ResultTable out;
    for (const auto& item : core.select_items) out.headers.push_back(print_expr(item));

    std::vector<PreparedLeaf> prepared;
    if (core.where) prepare(*core.where, prepared);

    std::vector<std::vector<const Value*>> rows;
    for (const auto& row : ws.rows) {
      if (core.where) {
        std::size_t cursor = 0;
        if (!eval_condition(ws, row, *core.where, prepared, cursor)) continue;
      }
      rows.push_back(row);
    }

    const bool any_agg = std::any_of(core.select_items.begin(), core.select_items.end(),
                                     [](const AggExpr& e) { return e.agg.has_value(); });
    const bool grouped = !core.group_by.empty();

    std::vector<std::vector<Value>> body;
    std::vector<Value> sort_keys;
    const bool want_sort = core.order_by.has_value();

    const auto eval_item = [&](const AggExpr& item,
                               const std::vector<std::vector<const Value*>>& group) -> Value {
      if (!item.agg) return eval_expr_base(ws, group.front(), item);
      AggExpr inner = item;
      inner.agg.reset();
      std::vector<Value> values;
      values.reserve(group.size());
      for (const auto& row : group) values.push_back(eval_expr_base(ws, row, inner));
      return aggregate(*item.agg, values);
    };

    if (grouped || any_agg) {
      // partition (a single all-rows group when there is no GROUP BY)
      std::vector<std::vector<std::vector<const Value*>>> groups;
      if (grouped) {
        std::map<std::string, std::size_t> index;
        for (const auto& row : rows) {
          std::string key;
          for (const auto& col : core.group_by) {
            key += row[resolve_binding(ws, col)]->group_key();
            key.push_back('\x1f');
          }
          const auto [it, inserted] = index.emplace(key, groups.size());
          if (inserted) groups.emplace_back();
          groups[it->second].push_back(row);
        }
      } else {
        groups.push_back(rows);  // possibly empty: aggregates still yield one row
      }
      for (const auto& group : groups) {
        if (group.empty() && grouped) continue;
        std::vector<Value> out_row;
        if (group.empty()) {
          for (const auto& item : core.select_items) {
            out_row.push_back(item.agg == AggFn::Count ? Value::number(0) : Value::null());
          }
          if (want_sort) sort_keys.push_back(Value::null());
        } else {
          for (const auto& item : core.select_items) out_row.push_back(eval_item(item, group));
          if (want_sort) sort_keys.push_back(eval_item(core.order_by->first, group));
        }
        body.push_back(std::move(out_row));
      }
    } else {
      for (const auto& row : rows) {
        std::vector<Value> out_row;
        for (const auto& item : core.select_items) {
          out_row.push_back(eval_expr_base(ws, row, item));
        }
        body.push_back(std::move(out_row));
        if (want_sort) sort_keys.push_back(eval_expr_base(ws, row, core.order_by->first));
      }
    }

    if (want_sort) {
      std::vector<std::size_t> order(body.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      const bool desc = core.order_by->second == SortDir::Desc;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Value& va = sort_keys[a];
        const Value& vb = sort_keys[b];
        if (va.is_null() || vb.is_null()) return !va.is_null() && vb.is_null();  // nulls last
        const auto cmp = compare_values(va, vb);
        if (!cmp || *cmp == 0) return false;
        return desc ? *cmp > 0 : *cmp < 0;
      });
      std::vector<std::vector<Value>> sorted;
      sorted.reserve(body.size());
      for (std::size_t i : order) sorted.push_back(std::move(body[i]));
      body = std::move(sorted);
    }

    if (core.limit && body.size() > static_cast<std::size_t>(*core.limit)) {
      body.resize(static_cast<std::size_t>(*core.limit));
    }
    out.rows = std::move(body);
    return out;
  }

  const Database& db_;
  const ExecOptions& opts_;
};

}  // namespace

ResultTable execute(const SqlAst& ast, const Database& db, const ExecOptions& opts) {
  return Evaluator(db, opts).run(ast);
}

}  // namespace catsforge
