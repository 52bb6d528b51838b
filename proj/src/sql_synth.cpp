#include "catsforge/sql_synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "catsforge/sql_parser.hpp"
#include "catsforge/strings.hpp"

namespace catsforge {

namespace {

struct Profile {
  double setop = 0.10;
  double multi_table = 0.25;
  std::array<double, 4> select_arity = {0.45, 0.35, 0.15, 0.05};
  double agg = 0.35;
  double mathop = 0.06;
  double where = 0.60;
  std::array<double, 3> cond_count = {0.55, 0.30, 0.15};
  double use_or = 0.25;
  double like = 0.12;
  double in_list = 0.10;
  double nested = 0.12;
  double group_by = 0.25;
  double group_by_2 = 0.25;
  double order_by = 0.35;
  double limit = 0.40;
};

Profile profile_from_weights(const std::map<std::string, double>& weights) {
  Profile p;
  const auto get = [&](const char* key, double fallback) {
    const auto it = weights.find(key);
    return it == weights.end() ? fallback : it->second;
  };
  p.setop = get("setop", p.setop);
  p.multi_table = get("multi_table", p.multi_table);
  for (int i = 0; i < 4; ++i) {
    p.select_arity[i] = get(("select_" + std::to_string(i + 1)).c_str(), p.select_arity[i]);
  }
  p.agg = get("agg", p.agg);
  p.mathop = get("mathop", p.mathop);
  p.where = get("where", p.where);
  for (int i = 0; i < 3; ++i) {
    p.cond_count[i] = get(("conds_" + std::to_string(i + 1)).c_str(), p.cond_count[i]);
  }
  p.use_or = get("or", p.use_or);
  p.like = get("like", p.like);
  p.in_list = get("in_list", p.in_list);
  p.nested = get("nested", p.nested);
  p.group_by = get("group_by", p.group_by);
  p.group_by_2 = get("group_by_2", p.group_by_2);
  p.order_by = get("order_by", p.order_by);
  p.limit = get("limit", p.limit);
  return p;
}

// Feature mixes that land in each hardness bucket often enough for
// rejection sampling to stay cheap.
Profile bucket_profile(Hardness h) {
  Profile p;
  switch (h) {
    case Hardness::Easy:
      p.setop = 0;
      p.multi_table = 0.06;
      p.select_arity = {1, 0, 0, 0};
      p.agg = 0.30;
      p.mathop = 0;
      p.where = 0.45;
      p.cond_count = {1, 0, 0};
      p.use_or = 0;
      p.like = 0;
      p.in_list = 0;
      p.nested = 0;
      p.group_by = 0;
      p.order_by = 0.22;
      p.limit = 0;
      break;
    case Hardness::Medium:
      p.setop = 0;
      p.multi_table = 0.25;
      p.select_arity = {0.35, 0.55, 0.10, 0};
      p.agg = 0.35;
      p.mathop = 0.05;
      p.where = 0.60;
      p.cond_count = {0.70, 0.30, 0};
      p.use_or = 0.20;
      p.like = 0.12;
      p.in_list = 0.08;
      p.nested = 0;
      p.group_by = 0.25;
      p.group_by_2 = 0;
      p.order_by = 0.35;
      p.limit = 0.35;
      break;
    case Hardness::Hard:
      p.setop = 0.10;
      p.multi_table = 0.30;
      p.select_arity = {0.30, 0.30, 0.30, 0.10};
      p.agg = 0.40;
      p.mathop = 0.08;
      p.where = 0.75;
      p.cond_count = {0.35, 0.45, 0.20};
      p.use_or = 0.25;
      p.like = 0.12;
      p.in_list = 0.08;
      p.nested = 0.25;
      p.group_by = 0.40;
      p.group_by_2 = 0.30;
      p.order_by = 0.45;
      p.limit = 0.30;
      break;
    case Hardness::ExtraHard:
      p.setop = 0.35;
      p.multi_table = 0.35;
      p.select_arity = {0.10, 0.30, 0.35, 0.25};
      p.agg = 0.50;
      p.mathop = 0.12;
      p.where = 0.90;
      p.cond_count = {0.10, 0.40, 0.50};
      p.use_or = 0.35;
      p.like = 0.15;
      p.in_list = 0.10;
      p.nested = 0.45;
      p.group_by = 0.50;
      p.group_by_2 = 0.50;
      p.order_by = 0.55;
      p.limit = 0.35;
      break;
  }
  return p;
}

struct ScopeColumn {
  std::string table;
  std::string column;
  CType type;
  const DataTable* owner;
  std::size_t index;
};

class Generator {
 public:
  Generator(const Database& db, const GenConfig& cfg, Rng& rng)
      : db_(db), cfg_(cfg), rng_(rng) {}

  SqlAst generate(const Profile& profile) {
    Profile p = profile;
    if (cfg_.max_depth <= 1) {
      // only the minimal production is available
      p = Profile{};
      p.setop = p.multi_table = p.agg = p.mathop = p.where = 0;
      p.group_by = p.order_by = p.limit = p.nested = 0;
      p.select_arity = {1, 0, 0, 0};
    }
    if (p.setop > 0 && rng_.chance(p.setop)) return generate_compound(p);
    return generate_select(p, 0);
  }

 private:
  static ColumnRef make_ref(const ScopeColumn& col, bool qualify) {
    ColumnRef ref;
    if (qualify) ref.table = col.table;
    ref.column = col.column;
    return ref;
  }

  std::vector<ScopeColumn> scope_columns(const std::vector<const DataTable*>& tables) const {
    std::vector<ScopeColumn> cols;
    for (const auto* t : tables) {
      for (std::size_t i = 0; i < t->columns.size(); ++i) {
        if (!lexes_as_identifier(t->columns[i].name)) continue;
        cols.push_back({t->name, t->columns[i].name, t->columns[i].type, t, i});
      }
    }
    return cols;
  }

  std::vector<Value> observed_values(const ScopeColumn& col) const {
    std::vector<Value> out;
    for (const auto& row : col.owner->rows) {
      if (!row[col.index].is_null()) out.push_back(row[col.index]);
    }
    return out;
  }

  const DataTable* pick_usable_table() {
    std::vector<const DataTable*> usable;
    for (const auto& t : db_.tables) {
      if (!lexes_as_identifier(t.name)) continue;
      if (scope_columns({&t}).empty()) continue;
      usable.push_back(&t);
    }
    if (usable.empty()) {
      throw GenFailure("no table in '" + db_.name + "' has sql-safe names");
    }
    return usable[rng_.below(usable.size())];
  }

  std::vector<const DataTable*> pick_tables(const Profile& p) {
    std::vector<const DataTable*> tables;
    const bool multi = db_.tables.size() > 1 && !db_.links.empty() && rng_.chance(p.multi_table);
    if (!multi) {
      tables.push_back(pick_usable_table());
      return tables;
    }
    const TableLink& link = db_.links[rng_.below(db_.links.size())];
    const DataTable* a = db_.find_table(link.table_a);
    const DataTable* b = db_.find_table(link.table_b);
    if (!a || !b || a == b || !lexes_as_identifier(a->name) ||
        !lexes_as_identifier(b->name) || scope_columns({a}).empty() ||
        scope_columns({b}).empty()) {
      tables.push_back(pick_usable_table());
      return tables;
    }
    tables = {a, b};
    // occasionally extend the chain to a third linked table
    if (rng_.chance(0.15)) {
      for (const auto& other : db_.links) {
        const DataTable* c = nullptr;
        if (other.table_a == a->name || other.table_a == b->name) {
          c = db_.find_table(other.table_b);
        } else if (other.table_b == a->name || other.table_b == b->name) {
          c = db_.find_table(other.table_a);
        }
        if (c && c != a && c != b && lexes_as_identifier(c->name) &&
            !scope_columns({c}).empty()) {
          tables.push_back(c);
          break;
        }
      }
    }
    return tables;
  }

  AggExpr make_aggregate(const std::vector<ScopeColumn>& cols, bool qualify) {
    const ScopeColumn& col = cols[rng_.below(cols.size())];
    AggExpr e;
    e.lhs = make_ref(col, qualify);
    std::vector<AggFn> fns = {AggFn::Min, AggFn::Max, AggFn::Count};
    if (col.type == CType::Number) {
      fns.push_back(AggFn::Sum);
      fns.push_back(AggFn::Avg);
    }
    e.agg = fns[rng_.below(fns.size())];
    return e;
  }

  std::optional<AggExpr> make_mathop(const std::vector<ScopeColumn>& cols, bool qualify) {
    std::vector<const ScopeColumn*> numeric;
    for (const auto& c : cols) {
      if (c.type == CType::Number) numeric.push_back(&c);
    }
    if (numeric.size() < 2) return std::nullopt;
    AggExpr e;
    const auto* l = numeric[rng_.below(numeric.size())];
    const auto* r = numeric[rng_.below(numeric.size())];
    if (l == r) return std::nullopt;
    e.lhs = make_ref(*l, qualify);
    e.rhs = make_ref(*r, qualify);
    // division invites zero divisors; keep it rare
    const std::array<MathOp, 4> ops = {MathOp::Add, MathOp::Sub, MathOp::Mul, MathOp::Div};
    const std::array<double, 4> w = {0.4, 0.3, 0.2, 0.1};
    e.op = ops[rng_.weighted({w.begin(), w.end()})];
    return e;
  }

  Literal sample_literal(const ScopeColumn& col, CmpOp op) {
    const auto values = observed_values(col);
    if (values.empty()) return Literal::string("");
    const Value& v = values[rng_.below(values.size())];
    if (col.type == CType::Number) {
      double x = v.num();
      const bool ordered = op == CmpOp::Gt || op == CmpOp::Ge || op == CmpOp::Lt || op == CmpOp::Le;
      if (ordered && rng_.chance(0.4)) {
        x *= 1.0 + rng_.uniform(-0.1, 0.1);
        x = std::round(x * 100.0) / 100.0;
      }
      return Literal::number(x);
    }
    return Literal::string(v.str());
  }

  Literal like_pattern(const ScopeColumn& col) {
    const auto values = observed_values(col);
    std::string base = values.empty() ? "" : values[rng_.below(values.size())].str();
    // substring by codepoints
    std::vector<std::pair<std::size_t, std::size_t>> cps;
    std::size_t i = 0;
    while (i < base.size()) {
      const std::size_t start = i;
      utf8_next(base, i);
      cps.emplace_back(start, i - start);
    }
    std::string sub = base;
    if (cps.size() >= 2) {
      const std::size_t take = std::max<std::size_t>(1, cps.size() / 2);
      const std::size_t from = rng_.below(cps.size() - take + 1);
      const std::size_t begin = cps[from].first;
      const std::size_t end = cps[from + take - 1].first + cps[from + take - 1].second;
      sub = base.substr(begin, end - begin);
    }
    switch (rng_.below(3)) {
      case 0: return Literal::string("%" + sub + "%");
      case 1: return Literal::string(sub + "%");
      default: return Literal::string("%" + sub);
    }
  }

  Condition make_leaf(const std::vector<ScopeColumn>& cols, bool qualify, const Profile& p,
                      int depth) {
    const ScopeColumn& col = cols[rng_.below(cols.size())];
    Condition::Leaf leaf;
    leaf.lhs.lhs = make_ref(col, qualify);

    const bool allow_nested = depth + 1 < cfg_.max_depth;
    if (allow_nested && rng_.chance(p.nested)) {
      if (col.type == CType::Number && rng_.chance(0.5)) {
        // scalar comparison against a single-row aggregate
        const std::array<CmpOp, 4> ops = {CmpOp::Gt, CmpOp::Ge, CmpOp::Lt, CmpOp::Le};
        leaf.op = ops[rng_.below(ops.size())];
        leaf.subquery = std::make_unique<SqlAst>(scalar_subquery(depth + 1));
        return Condition(std::move(leaf));
      }
      if (auto sub = membership_subquery(col, depth + 1)) {
        leaf.op = rng_.chance(0.75) ? CmpOp::In : CmpOp::NotIn;
        leaf.subquery = std::make_unique<SqlAst>(std::move(*sub));
        return Condition(std::move(leaf));
      }
    }

    if (col.type == CType::Text && rng_.chance(p.like)) {
      leaf.op = CmpOp::Like;
      leaf.values.push_back(like_pattern(col));
      return Condition(std::move(leaf));
    }
    if (rng_.chance(p.in_list)) {
      leaf.op = rng_.chance(0.8) ? CmpOp::In : CmpOp::NotIn;
      const auto values = observed_values(col);
      std::set<std::string> seen;
      const std::size_t want = 2 + rng_.below(2);
      for (std::size_t k = 0; k < 8 && leaf.values.size() < want && !values.empty(); ++k) {
        const Value& v = values[rng_.below(values.size())];
        if (!seen.insert(v.group_key()).second) continue;
        leaf.values.push_back(col.type == CType::Number ? Literal::number(v.num())
                                                        : Literal::string(v.str()));
      }
      if (leaf.values.size() >= 2) return Condition(std::move(leaf));
      leaf.values.clear();
    }
    std::vector<CmpOp> ops = {CmpOp::Eq, CmpOp::Ne};
    if (col.type == CType::Number || col.type == CType::Time) {
      ops.insert(ops.end(), {CmpOp::Gt, CmpOp::Ge, CmpOp::Lt, CmpOp::Le});
    }
    leaf.op = ops[rng_.below(ops.size())];
    leaf.values.push_back(sample_literal(col, leaf.op));
    return Condition(std::move(leaf));
  }

  SqlAst scalar_subquery(int depth) {
    SqlAst sub;
    const DataTable* t = pick_usable_table();
    const auto cols = scope_columns({t});
    std::vector<const ScopeColumn*> numeric;
    for (const auto& c : cols) {
      if (c.type == CType::Number) numeric.push_back(&c);
    }
    AggExpr item;
    if (numeric.empty()) {
      // COUNT works over any column
      item.agg = AggFn::Count;
      item.lhs = ColumnRef{"", cols[rng_.below(cols.size())].column};
    } else {
      const auto* col = numeric[rng_.below(numeric.size())];
      const std::array<AggFn, 4> fns = {AggFn::Avg, AggFn::Min, AggFn::Max, AggFn::Sum};
      item.agg = fns[rng_.below(fns.size())];
      item.lhs = ColumnRef{"", col->column};
    }
    sub.select.select_items.push_back(std::move(item));
    sub.select.from_tables.push_back(t->name);
    maybe_simple_where(sub, *t, depth);
    return sub;
  }

  std::optional<SqlAst> membership_subquery(const ScopeColumn& outer, int depth) {
    // prefer a same-named column in another table (overlap-linked values)
    std::vector<ScopeColumn> candidates;
    for (const auto& t : db_.tables) {
      if (!lexes_as_identifier(t.name)) continue;
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (t.columns[i].type != outer.type) continue;
        if (!lexes_as_identifier(t.columns[i].name)) continue;
        if (t.name == outer.table && t.columns[i].name == outer.column) continue;
        ScopeColumn c{t.name, t.columns[i].name, t.columns[i].type, &t, i};
        if (t.columns[i].name == outer.column) {
          candidates.insert(candidates.begin(), c);
        } else {
          candidates.push_back(c);
        }
      }
    }
    if (candidates.empty()) return std::nullopt;
    const ScopeColumn& col =
        candidates[rng_.chance(0.7) ? 0 : rng_.below(candidates.size())];
    SqlAst sub;
    AggExpr item;
    item.lhs = ColumnRef{"", col.column};
    sub.select.select_items.push_back(std::move(item));
    sub.select.from_tables.push_back(col.table);
    maybe_simple_where(sub, *col.owner, depth);
    return sub;
  }

  void maybe_simple_where(SqlAst& sub, const DataTable& t, int depth) {
    if (!rng_.chance(0.5)) return;
    const auto cols = scope_columns({&t});
    if (cols.empty()) return;
    Profile flat;
    flat.nested = 0;
    flat.like = 0.1;
    flat.in_list = 0;
    sub.select.where = make_leaf(cols, false, flat, depth);
  }

  Condition make_condition(const std::vector<ScopeColumn>& cols, bool qualify, const Profile& p,
                           int depth) {
    const std::size_t leaves =
        1 + rng_.weighted({p.cond_count.begin(), p.cond_count.end()});
    if (leaves == 1) return make_leaf(cols, qualify, p, depth);
    Condition::Node node;
    node.conn = rng_.chance(p.use_or) ? Connector::Or : Connector::And;
    for (std::size_t i = 0; i < leaves; ++i) {
      node.children.push_back(make_leaf(cols, qualify, p, depth));
    }
    return Condition(std::move(node));
  }

  SqlAst generate_select(const Profile& p, int depth, bool allow_order = true) {
    const auto tables = pick_tables(p);
    const bool qualify = tables.size() > 1;
    const auto cols = scope_columns(tables);

    SqlAst ast;
    auto& core = ast.select;
    for (const auto* t : tables) core.from_tables.push_back(t->name);

    const bool grouped = rng_.chance(p.group_by);
    std::size_t arity =
        1 + rng_.weighted({p.select_arity.begin(), p.select_arity.end()});

    if (grouped) {
      // group keys first, aggregates after
      const std::size_t n_keys = rng_.chance(p.group_by_2) && cols.size() > 1 ? 2 : 1;
      std::set<std::size_t> chosen;
      while (chosen.size() < n_keys) chosen.insert(rng_.below(cols.size()));
      for (std::size_t idx : chosen) {
        core.group_by.push_back(make_ref(cols[idx], qualify));
        AggExpr key;
        key.lhs = make_ref(cols[idx], qualify);
        core.select_items.push_back(std::move(key));
      }
      const std::size_t n_aggs = std::max<std::size_t>(1, arity > n_keys ? arity - n_keys : 1);
      for (std::size_t i = 0; i < n_aggs; ++i) {
        core.select_items.push_back(make_aggregate(cols, qualify));
      }
    } else if (rng_.chance(p.agg)) {
      for (std::size_t i = 0; i < arity; ++i) {
        core.select_items.push_back(make_aggregate(cols, qualify));
      }
    } else {
      std::set<std::string> used;
      for (std::size_t i = 0; i < arity; ++i) {
        if (rng_.chance(p.mathop)) {
          if (auto m = make_mathop(cols, qualify)) {
            core.select_items.push_back(std::move(*m));
            continue;
          }
        }
        const ScopeColumn& col = cols[rng_.below(cols.size())];
        if (!used.insert(col.table + "." + col.column).second) continue;
        AggExpr e;
        e.lhs = make_ref(col, qualify);
        core.select_items.push_back(std::move(e));
      }
      if (core.select_items.empty()) {
        AggExpr e;
        e.lhs = make_ref(cols[rng_.below(cols.size())], qualify);
        core.select_items.push_back(std::move(e));
      }
    }

    if (rng_.chance(p.where)) {
      core.where = make_condition(cols, qualify, p, depth);
    }

    if (allow_order && rng_.chance(p.order_by)) {
      const bool all_agg = std::all_of(core.select_items.begin(), core.select_items.end(),
                                       [](const AggExpr& e) { return e.agg.has_value(); });
      AggExpr key;
      if (grouped || all_agg) {
        key = core.select_items[rng_.below(core.select_items.size())];
      } else {
        key.lhs = make_ref(cols[rng_.below(cols.size())], qualify);
      }
      core.order_by = {std::move(key), rng_.chance(0.5) ? SortDir::Desc : SortDir::Asc};
      if (rng_.chance(p.limit)) core.limit = rng_.range(1, 5);
    }
    return ast;
  }

  SqlAst generate_compound(const Profile& p) {
    Profile operand = p;
    operand.setop = 0;
    SqlAst lhs = generate_select(operand, 0, /*allow_order=*/false);
    SqlAst rhs = clone(lhs);
    rhs.select.where.reset();
    Profile forced = operand;
    forced.where = 1.0;
    const auto tables = rhs.select.from_tables;
    std::vector<const DataTable*> resolved;
    for (const auto& name : tables) resolved.push_back(db_.find_table(name));
    const auto cols = scope_columns(resolved);
    rhs.select.where = make_condition(cols, tables.size() > 1, forced, 0);

    SqlAst out;
    SqlAst::Compound compound;
    const std::array<SetOp, 3> ops = {SetOp::Union, SetOp::Intersect, SetOp::Except};
    compound.op = ops[rng_.below(ops.size())];
    compound.lhs = std::make_unique<SqlAst>(std::move(lhs));
    compound.rhs = std::make_unique<SqlAst>(std::move(rhs));
    out.compound = std::move(compound);
    return out;
  }

  const Database& db_;
  const GenConfig& cfg_;
  Rng& rng_;
};

SqlAst generate_with_profile(const Database& db, const GenConfig& cfg, Rng& rng,
                             const Profile& profile) {
  if (db.tables.empty()) throw GenFailure("database '" + db.name + "' has no tables");
  Generator gen(db, cfg, rng);
  for (int attempt = 0; attempt < std::max(1, cfg.max_attempts_per_example); ++attempt) {
    SqlAst ast = gen.generate(profile);
    if (validate_schema(ast, db).empty()) return ast;
  }
  throw GenFailure("no schema-valid query after " +
                   std::to_string(cfg.max_attempts_per_example) + " attempts on '" +
                   db.name + "'");
}

}  // namespace

SqlAst generate_sql(const Database& db, const GenConfig& cfg, Rng& rng) {
  return generate_with_profile(db, cfg, rng, profile_from_weights(cfg.rule_weights));
}

std::vector<RawExample> sample_dataset(const std::vector<Database>& dbs,
                                       const GenConfig& cfg, std::size_t n) {
  if (dbs.empty()) throw GenFailure("no databases to sample from");
  if (n == 0) return {};

  // per-bucket counts: floor allocation, remainder by largest fraction
  std::map<Hardness, double> targets = cfg.hardness_targets;
  if (targets.empty()) targets = {{Hardness::Easy, 0.25},
                                  {Hardness::Medium, 0.25},
                                  {Hardness::Hard, 0.25},
                                  {Hardness::ExtraHard, 0.25}};
  double total = 0;
  for (const auto& [h, f] : targets) total += f;
  if (std::fabs(total - 1.0) > 1e-9) {
    throw GenFailure("hardness_targets must sum to 1");
  }
  const std::array<Hardness, 4> order = {Hardness::Easy, Hardness::Medium, Hardness::Hard,
                                         Hardness::ExtraHard};
  std::map<Hardness, std::size_t> quota;
  std::vector<std::pair<double, Hardness>> fractions;
  std::size_t assigned = 0;
  for (Hardness h : order) {
    const double want = static_cast<double>(n) * (targets.count(h) ? targets.at(h) : 0.0);
    const std::size_t whole = static_cast<std::size_t>(want);
    quota[h] = whole;
    assigned += whole;
    fractions.emplace_back(want - static_cast<double>(whole), h);
  }
  std::stable_sort(fractions.begin(), fractions.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i) {
    ++quota[fractions[i % fractions.size()].second];
    ++assigned;
  }

  std::vector<RawExample> out;
  out.reserve(n);
  const ExecOptions exec_opts;
  for (Hardness bucket : order) {
    const Profile profile = bucket_profile(bucket);
    std::size_t need = quota[bucket];
    if (need == 0) continue;
    // round-robin over databases, one substream per database
    std::vector<Rng> streams;
    streams.reserve(dbs.size());
    for (std::size_t i = 0; i < dbs.size(); ++i) {
      streams.emplace_back(Rng::mix(cfg.seed, (i + 1) * 4 + static_cast<std::size_t>(bucket)));
    }
    std::size_t db_idx = 0;
    long long budget =
        static_cast<long long>(cfg.max_attempts_per_example) * static_cast<long long>(need);
    while (need > 0) {
      const Database& db = dbs[db_idx % dbs.size()];
      Rng& rng = streams[db_idx % dbs.size()];
      ++db_idx;
      bool produced = false;
      while (budget > 0 && !produced) {
        --budget;
        SqlAst ast;
        try {
          ast = generate_with_profile(db, cfg, rng, profile);
        } catch (const GenFailure&) {
          break;
        }
        if (classify_hardness(ast) != bucket) continue;
        try {
          ResultTable table = execute(ast, db, exec_opts);
          if (is_empty(table)) continue;
          RawExample ex;
          ex.sql = std::move(ast);
          ex.table = std::move(table);
          ex.db_name = db.name;
          ex.hardness = bucket;
          out.push_back(std::move(ex));
          produced = true;
        } catch (const ExecError&) {
          continue;
        }
      }
      if (produced) {
        --need;
      } else if (budget <= 0) {
        throw GenFailure(std::string("could not fill the '") + to_string(bucket) +
                         "' bucket within the attempt budget");
      }
    }
  }
  return out;
}

}  // namespace catsforge
