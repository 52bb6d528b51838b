#include "catsforge/temp_gen.hpp"

#include <fstream>

#include "catsforge/strings.hpp"

namespace catsforge {

std::string lexicon_key(AggFn fn) {
  switch (fn) {
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
    case AggFn::Count: return "count";
    case AggFn::Sum: return "sum";
    case AggFn::Avg: return "avg";
  }
  return "";
}

std::string lexicon_key(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "eq";
    case CmpOp::Ne: return "ne";
    case CmpOp::Gt: return "gt";
    case CmpOp::Ge: return "ge";
    case CmpOp::Lt: return "lt";
    case CmpOp::Le: return "le";
    case CmpOp::Like: return "like";
    case CmpOp::In: return "in";
    case CmpOp::NotIn: return "not_in";
  }
  return "";
}

std::string lexicon_key(MathOp op) {
  switch (op) {
    case MathOp::Add: return "add";
    case MathOp::Sub: return "sub";
    case MathOp::Mul: return "mul";
    case MathOp::Div: return "div";
  }
  return "";
}

std::string lexicon_key(Connector c) { return c == Connector::And ? "and" : "or"; }

std::string lexicon_key(SortDir d) { return d == SortDir::Asc ? "asc" : "desc"; }

std::string lexicon_key(SetOp op) {
  switch (op) {
    case SetOp::Union: return "union";
    case SetOp::Intersect: return "intersect";
    case SetOp::Except: return "except";
  }
  return "";
}

const std::string& Lexicon::phrase(const std::string& key) const {
  const auto it = entries.find(key);
  if (it == entries.end() || it->second.empty()) {
    throw MissingLexEntry("lexicon has no phrase for '" + key + "'");
  }
  return it->second;
}

Lexicon Lexicon::defaults() {
  Lexicon lex;
  lex.entries = {
      {"min", "最小的"},
      {"max", "最大的"},
      {"count", "数量"},
      {"sum", "总共"},
      {"avg", "平均"},
      {"eq", "等于"},
      {"ne", "不等于"},
      {"gt", "大于"},
      {"ge", "大于等于"},
      {"lt", "小于"},
      {"le", "不小于"},
      {"and", "并且"},
      {"or", "或者"},
      {"asc", "从低到高"},
      {"desc", "从高到低"},
      {"like", "包含"},
      {"in", "属于"},
      {"not_in", "不属于"},
      {"union", "或者满足"},
      {"intersect", "同时满足"},
      {"except", "但排除"},
      {"add", "加"},
      {"sub", "减"},
      {"mul", "乘"},
      {"div", "除以"},
  };
  return lex;
}

namespace {

std::map<std::string, std::string> load_kv_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + " file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(std::string("bad ") + what + " line (want KEY<TAB>VALUE): " + line);
    }
    out[strip(line.substr(0, tab))] = line.substr(tab + 1);
  }
  return out;
}

}  // namespace

Lexicon Lexicon::load(const std::string& path) {
  Lexicon lex = defaults();
  for (auto& [key, value] : load_kv_file(path, "lexicon")) {
    lex.entries[key] = value;
  }
  lex.check_total();
  return lex;
}

void Lexicon::check_total() const {
  for (const auto& [key, unused] : defaults().entries) {
    (void)unused;
    phrase(key);  // throws on gaps
  }
}

const std::string& TemplateSet::pattern(const std::string& key) const {
  const auto it = patterns.find(key);
  if (it == patterns.end()) {
    throw std::runtime_error("template set has no pattern '" + key + "'");
  }
  return it->second;
}

std::string TemplateSet::fill(const std::string& key,
                              const std::map<std::string, std::string>& slots) const {
  const std::string& tpl = pattern(key);
  std::string out;
  out.reserve(tpl.size());
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '{') {
      const auto close = tpl.find('}', i);
      if (close == std::string::npos) {
        throw std::runtime_error("unbalanced '{' in template '" + key + "'");
      }
      const std::string name = tpl.substr(i + 1, close - i - 1);
      const auto slot = slots.find(name);
      if (slot == slots.end()) {
        throw std::runtime_error("template '" + key + "' uses unknown slot '" + name + "'");
      }
      out += slot->second;
      i = close + 1;
    } else {
      out.push_back(tpl[i++]);
    }
  }
  return out;
}

TemplateSet TemplateSet::defaults() {
  TemplateSet ts;
  ts.patterns = {
      {"sentence", "查询{from}中{where}{select}{group}{order}{limit}"},
      {"where", "满足{conditions}的"},
      {"select_item_agg", "{agg}{column}"},
      {"select_item_math", "{lhs}{op}{rhs}"},
      {"item_joiner", "、"},
      {"from_joiner", "和"},
      {"cond_value", "{lhs}{op}{value}"},
      {"cond_subquery", "{lhs}{op}（{subquery}）"},
      {"cond_group_open", "（"},
      {"cond_group_close", "）"},
      {"group", "按{columns}分组后"},
      {"order", "，并按{expr}{dir}排序"},
      {"limit", "，取前{n}条"},
      {"setop", "{left}，{op}：{right}"},
      {"cell", "{header}为{value}"},
      {"cell_joiner", "，"},
      {"row_joiner", "；"},
      {"answer", "{sql}。结果为：{table}。"},
  };
  return ts;
}

TemplateSet TemplateSet::load(const std::string& path) {
  TemplateSet ts = defaults();
  for (auto& [key, value] : load_kv_file(path, "template")) {
    ts.patterns[key] = value;
  }
  return ts;
}

namespace {

std::string render_expr(const AggExpr& e, const Lexicon& lex, const TemplateSet& ts) {
  std::string inner;
  if (e.op) {
    inner = ts.fill("select_item_math", {{"lhs", e.lhs.column},
                                         {"op", lex.phrase(lexicon_key(*e.op))},
                                         {"rhs", e.rhs.column}});
  } else {
    inner = e.lhs.column;
  }
  if (!e.agg) return inner;
  return ts.fill("select_item_agg",
                 {{"agg", lex.phrase(lexicon_key(*e.agg))}, {"column", inner}});
}

std::string render_condition(const Condition& cond, const Lexicon& lex, const TemplateSet& ts);

std::string render_leaf(const Condition::Leaf& leaf, const Lexicon& lex, const TemplateSet& ts) {
  const std::string lhs = render_expr(leaf.lhs, lex, ts);
  const std::string op = lex.phrase(lexicon_key(leaf.op));
  if (leaf.subquery) {
    return ts.fill("cond_subquery",
                   {{"lhs", lhs},
                    {"op", op},
                    {"subquery", render_sql_description(*leaf.subquery, lex, ts)}});
  }
  std::vector<std::string> values;
  for (const auto& v : leaf.values) values.push_back(v.text);
  return ts.fill("cond_value",
                 {{"lhs", lhs}, {"op", op}, {"value", join(values, ts.pattern("item_joiner"))}});
}

std::string render_condition(const Condition& cond, const Lexicon& lex, const TemplateSet& ts) {
  if (cond.is_leaf()) return render_leaf(cond.leaf(), lex, ts);
  std::vector<std::string> parts;
  for (const auto& child : cond.node().children) {
    std::string s = render_condition(child, lex, ts);
    if (!child.is_leaf()) {
      s = ts.pattern("cond_group_open") + s + ts.pattern("cond_group_close");
    }
    parts.push_back(std::move(s));
  }
  return join(parts, lex.phrase(lexicon_key(cond.node().conn)));
}

}  // namespace

std::string render_sql_description(const SqlAst& ast, const Lexicon& lex,
                                   const TemplateSet& ts) {
  if (ast.is_compound()) {
    return ts.fill("setop",
                   {{"left", render_sql_description(*ast.compound->lhs, lex, ts)},
                    {"op", lex.phrase(lexicon_key(ast.compound->op))},
                    {"right", render_sql_description(*ast.compound->rhs, lex, ts)}});
  }
  const auto& core = ast.select;
  std::vector<std::string> items;
  for (const auto& item : core.select_items) items.push_back(render_expr(item, lex, ts));
  std::map<std::string, std::string> slots = {
      {"from", join(core.from_tables, ts.pattern("from_joiner"))},
      {"select", join(items, ts.pattern("item_joiner"))},
      {"where", ""},
      {"group", ""},
      {"order", ""},
      {"limit", ""},
  };
  if (core.where) {
    slots["where"] =
        ts.fill("where", {{"conditions", render_condition(*core.where, lex, ts)}});
  }
  if (!core.group_by.empty()) {
    std::vector<std::string> cols;
    for (const auto& c : core.group_by) cols.push_back(c.column);
    slots["group"] = ts.fill("group", {{"columns", join(cols, ts.pattern("item_joiner"))}});
  }
  if (core.order_by) {
    slots["order"] = ts.fill("order", {{"expr", render_expr(core.order_by->first, lex, ts)},
                                       {"dir", lex.phrase(lexicon_key(core.order_by->second))}});
  }
  if (core.limit) {
    slots["limit"] = ts.fill("limit", {{"n", std::to_string(*core.limit)}});
  }
  return ts.fill("sentence", slots);
}

std::string render_table_description(const ResultTable& rt, const TemplateSet& ts) {
  std::vector<std::string> row_parts;
  for (const auto& row : rt.rows) {
    std::vector<std::string> cells;
    for (std::size_t c = 0; c < row.size(); ++c) {
      cells.push_back(ts.fill(
          "cell", {{"header", c < rt.headers.size() ? rt.headers[c] : ""},
                   {"value", row[c].str()}}));
    }
    row_parts.push_back(join(cells, ts.pattern("cell_joiner")));
  }
  return join(row_parts, ts.pattern("row_joiner"));
}

std::string temp_describe(const SqlAst& ast, const ResultTable& rt, const Lexicon& lex,
                          const TemplateSet& ts) {
  return ts.fill("answer", {{"sql", render_sql_description(ast, lex, ts)},
                            {"table", render_table_description(rt, ts)}});
}

}  // namespace catsforge
