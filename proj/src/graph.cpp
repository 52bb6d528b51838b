#include "catsforge/graph.hpp"

#include <algorithm>

#include "catsforge/strings.hpp"

namespace catsforge {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::SqlKeyword: return "sql_keyword";
    case NodeKind::SqlColumn: return "sql_column";
    case NodeKind::SqlValue: return "sql_value";
    case NodeKind::SqlOp: return "sql_op";
    case NodeKind::TableHeader: return "table_header";
    case NodeKind::TableCell: return "table_cell";
  }
  return "sql_keyword";
}

namespace {

NodeKind kind_from_string(std::string_view s) {
  if (s == "sql_keyword") return NodeKind::SqlKeyword;
  if (s == "sql_column") return NodeKind::SqlColumn;
  if (s == "sql_value") return NodeKind::SqlValue;
  if (s == "sql_op") return NodeKind::SqlOp;
  if (s == "table_header") return NodeKind::TableHeader;
  if (s == "table_cell") return NodeKind::TableCell;
  throw std::runtime_error("unknown node kind '" + std::string(s) + "'");
}

}  // namespace

int UnifiedGraph::add_node(std::string label, NodeKind kind, int row, int col) {
  const int id = static_cast<int>(nodes.size());
  nodes.push_back({id, std::move(label), kind, row, col});
  return id;
}

void UnifiedGraph::add_edge(int a, int b) {
  edges.emplace(std::min(a, b), std::max(a, b));
}

bool UnifiedGraph::has_edge(int a, int b) const {
  return edges.count({std::min(a, b), std::max(a, b)}) != 0;
}

void UnifiedGraph::add_self_loops() {
  for (const auto& n : nodes) edges.emplace(n.id, n.id);
}

namespace {

class SqlGraphBuilder {
 public:
  explicit SqlGraphBuilder(UnifiedGraph& g) : g_(g) {}

  int build(const SqlAst& ast) {
    if (ast.is_compound()) {
      const int op = g_.add_node(to_string(ast.compound->op), NodeKind::SqlOp);
      const int lhs = build(*ast.compound->lhs);
      const int rhs = build(*ast.compound->rhs);
      g_.add_edge(op, lhs);
      g_.add_edge(op, rhs);
      return op;
    }
    const auto& core = ast.select;
    const int root = g_.add_node("SELECT", NodeKind::SqlKeyword);
    for (const auto& item : core.select_items) {
      g_.add_edge(root, build_expr(item));
    }
    for (const auto& table : core.from_tables) {
      g_.add_edge(root, g_.add_node(table, NodeKind::SqlValue));
    }
    if (core.where) {
      const int kw = g_.add_node("WHERE", NodeKind::SqlKeyword);
      g_.add_edge(root, kw);
      g_.add_edge(kw, build_condition(*core.where));
    }
    if (!core.group_by.empty()) {
      const int kw = g_.add_node("GROUP BY", NodeKind::SqlKeyword);
      g_.add_edge(root, kw);
      for (const auto& col : core.group_by) {
        g_.add_edge(kw, g_.add_node(col.display(), NodeKind::SqlColumn));
      }
    }
    if (core.order_by) {
      const int kw = g_.add_node("ORDER BY", NodeKind::SqlKeyword);
      g_.add_edge(root, kw);
      g_.add_edge(kw, build_expr(core.order_by->first));
      g_.add_edge(kw, g_.add_node(to_string(core.order_by->second), NodeKind::SqlKeyword));
    }
    if (core.limit) {
      const int kw = g_.add_node("LIMIT", NodeKind::SqlKeyword);
      g_.add_edge(root, kw);
      g_.add_edge(kw, g_.add_node(std::to_string(*core.limit), NodeKind::SqlValue));
    }
    return root;
  }

 private:
  int build_expr(const AggExpr& e) {
    int inner;
    if (e.op) {
      inner = g_.add_node(to_string(*e.op), NodeKind::SqlOp);
      g_.add_edge(inner, g_.add_node(e.lhs.display(), NodeKind::SqlColumn));
      g_.add_edge(inner, g_.add_node(e.rhs.display(), NodeKind::SqlColumn));
    } else {
      inner = g_.add_node(e.lhs.display(), NodeKind::SqlColumn);
    }
    if (!e.agg) return inner;
    const int agg = g_.add_node(to_string(*e.agg), NodeKind::SqlKeyword);
    g_.add_edge(agg, inner);
    return agg;
  }

  int build_condition(const Condition& cond) {
    if (!cond.is_leaf()) {
      const int conn = g_.add_node(to_string(cond.node().conn), NodeKind::SqlOp);
      for (const auto& child : cond.node().children) {
        g_.add_edge(conn, build_condition(child));
      }
      return conn;
    }
    const auto& leaf = cond.leaf();
    const int op = g_.add_node(to_string(leaf.op), NodeKind::SqlOp);
    g_.add_edge(op, build_expr(leaf.lhs));
    if (leaf.subquery) {
      g_.add_edge(op, build(*leaf.subquery));
    } else {
      for (const auto& value : leaf.values) {
        g_.add_edge(op, g_.add_node(value.text, NodeKind::SqlValue));
      }
    }
    return op;
  }

  UnifiedGraph& g_;
};

}  // namespace

UnifiedGraph build_sql_graph(const SqlAst& ast) {
  UnifiedGraph g;
  SqlGraphBuilder(g).build(ast);
  return g;
}

UnifiedGraph build_table_graph(const ResultTable& rt) {
  UnifiedGraph g;
  const std::size_t n_cols = rt.headers.size();
  std::vector<int> header_ids;
  header_ids.reserve(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    header_ids.push_back(
        g.add_node(rt.headers[c], NodeKind::TableHeader, -1, static_cast<int>(c)));
  }
  for (std::size_t r = 0; r < rt.rows.size(); ++r) {
    std::vector<int> row_ids;
    row_ids.reserve(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
      // null cells carry no surface string; label them so they tokenize
      std::string label = rt.rows[r][c].str();
      if (label.empty()) label = "NULL";
      const int id = g.add_node(std::move(label), NodeKind::TableCell,
                                static_cast<int>(r), static_cast<int>(c));
      g.add_edge(header_ids[c], id);
      row_ids.push_back(id);
    }
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
      for (std::size_t j = i + 1; j < row_ids.size(); ++j) {
        g.add_edge(row_ids[i], row_ids[j]);
      }
    }
  }
  return g;
}

namespace {

// "AVG(t.c)" and "t.c" both normalize to "c"
std::string normalize_column_name(std::string_view s) {
  std::string t = remove_whitespace(s);
  for (const char* agg : {"MIN", "MAX", "COUNT", "SUM", "AVG"}) {
    const std::string prefix = std::string(agg) + "(";
    if (t.size() > prefix.size() + 0 && to_lower_ascii(t.substr(0, prefix.size())) ==
                                            to_lower_ascii(prefix) &&
        t.back() == ')') {
      t = t.substr(prefix.size(), t.size() - prefix.size() - 1);
      break;
    }
  }
  const auto dot = t.rfind('.');
  if (dot != std::string::npos) t = t.substr(dot + 1);
  return to_lower_ascii(t);
}

}  // namespace

UnifiedGraph unify(const UnifiedGraph& sql_g, const UnifiedGraph& table_g) {
  UnifiedGraph g = sql_g;
  const int offset = static_cast<int>(sql_g.nodes.size());
  for (const auto& n : table_g.nodes) {
    g.add_node(n.label, n.kind, n.row, n.col);
  }
  for (const auto& [a, b] : table_g.edges) {
    g.add_edge(a + offset, b + offset);
  }
  for (const auto& sql_node : sql_g.nodes) {
    if (sql_node.kind != NodeKind::SqlColumn) continue;
    const std::string name = normalize_column_name(sql_node.label);
    for (const auto& table_node : table_g.nodes) {
      if (table_node.kind != NodeKind::TableHeader) continue;
      if (normalize_column_name(table_node.label) == name) {
        g.add_edge(sql_node.id, table_node.id + offset);
      }
    }
  }
  g.add_self_loops();
  return g;
}

std::vector<std::string> DefaultTokenizer::tokenize(std::string_view label) const {
  std::vector<std::string> tokens;
  std::string run;
  const auto flush = [&] {
    if (!run.empty()) {
      tokens.push_back(run);
      run.clear();
    }
  };
  std::size_t i = 0;
  while (i < label.size()) {
    const std::size_t start = i;
    const char32_t cp = utf8_next(label, i);
    if (is_space_cp(cp)) {
      flush();
      continue;
    }
    const bool ascii_word =
        cp < 0x80 && ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
                      (cp >= '0' && cp <= '9') || cp == '_');
    if (ascii_word) {
      run.append(label.substr(start, i - start));
      continue;
    }
    flush();
    tokens.emplace_back(label.substr(start, i - start));
  }
  flush();
  return tokens;
}

TokenGraph tokenize_graph(const UnifiedGraph& g, const Tokenizer& tok) {
  TokenGraph out;
  std::vector<std::vector<int>> node_tokens(g.nodes.size());
  for (const auto& node : g.nodes) {
    const auto texts = tok.tokenize(node.label);
    if (texts.empty()) {
      throw TokenizeError("node " + std::to_string(node.id) + " has an untokenizable label '" +
                          node.label + "'");
    }
    for (const auto& text : texts) {
      const int id = static_cast<int>(out.tokens.size());
      out.tokens.push_back({id, text, node.id, node.kind});
      node_tokens[node.id].push_back(id);
    }
  }
  out.segment_count = static_cast<int>(g.nodes.size());
  for (const auto& [a, b] : g.edges) {
    if (a == b) {
      const auto& ts = node_tokens[a];
      for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i; j < ts.size(); ++j) {
          out.edges.emplace(ts[i], ts[j]);
        }
      }
    } else {
      for (int ta : node_tokens[a]) {
        for (int tb : node_tokens[b]) {
          out.edges.emplace(std::min(ta, tb), std::max(ta, tb));
        }
      }
    }
  }
  return out;
}

nlohmann::json export_graph(const TokenGraph& tg) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& t : tg.tokens) {
    tokens.push_back({{"text", t.text}, {"segment", t.segment_id}, {"kind", to_string(t.kind)}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : tg.edges) {
    edges.push_back({a, b});
  }
  return {{"tokens", std::move(tokens)}, {"edges", std::move(edges)}};
}

TokenGraph import_graph(const nlohmann::json& j) {
  TokenGraph tg;
  int max_segment = -1;
  for (const auto& t : j.at("tokens")) {
    GraphToken token;
    token.id = static_cast<int>(tg.tokens.size());
    token.text = t.at("text").get<std::string>();
    token.segment_id = t.at("segment").get<int>();
    token.kind = kind_from_string(t.at("kind").get<std::string>());
    max_segment = std::max(max_segment, token.segment_id);
    tg.tokens.push_back(std::move(token));
  }
  tg.segment_count = max_segment + 1;
  for (const auto& e : j.at("edges")) {
    const int a = e.at(0).get<int>();
    const int b = e.at(1).get<int>();
    if (a < 0 || b < 0 || a >= static_cast<int>(tg.tokens.size()) ||
        b >= static_cast<int>(tg.tokens.size())) {
      throw std::runtime_error("edge endpoint out of range");
    }
    tg.edges.emplace(std::min(a, b), std::max(a, b));
  }
  return tg;
}

std::vector<std::vector<std::uint8_t>> adjacency(const TokenGraph& tg) {
  const std::size_t n = tg.tokens.size();
  std::vector<std::vector<std::uint8_t>> adj(n, std::vector<std::uint8_t>(n, 0));
  for (const auto& [a, b] : tg.edges) {
    adj[a][b] = 1;
    adj[b][a] = 1;
  }
  return adj;
}

}  // namespace catsforge
