#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "catsforge/sql_ast.hpp"
#include "catsforge/sql_exec.hpp"

namespace catsforge {

enum class NodeKind {
  SqlKeyword,   // clause keywords, aggregates, sort direction
  SqlColumn,    // column references
  SqlValue,     // literals, LIMIT counts, table names
  SqlOp,        // comparison/arithmetic operators, connectors, set ops
  TableHeader,
  TableCell,
};

const char* to_string(NodeKind k);

struct GraphNode {
  int id = 0;
  std::string label;
  NodeKind kind = NodeKind::SqlKeyword;
  int row = -1;  // table-node origin; -1 for SQL nodes
  int col = -1;
};

// Undirected graph with canonical (min,max) edge storage.
struct UnifiedGraph {
  std::vector<GraphNode> nodes;
  std::set<std::pair<int, int>> edges;

  int add_node(std::string label, NodeKind kind, int row = -1, int col = -1);
  void add_edge(int a, int b);
  bool has_edge(int a, int b) const;
  void add_self_loops();
};

// SQL tree fragment: the SELECT keyword is the root, select expressions
// and FROM table names hang off it, WHERE/GROUP BY/ORDER BY/LIMIT create
// keyword nodes with their operand subtrees. |edges| == |nodes| - 1.
UnifiedGraph build_sql_graph(const SqlAst& ast);

// Table fragment: one header node per column, one cell node per cell,
// header-cell edges within a column and cell-cell cliques within a row.
// Null cells (empty display string) are labelled "NULL" so that every
// node tokenizes.
UnifiedGraph build_table_graph(const ResultTable& rt);

// Disjoint union plus one edge per (SqlColumn node, TableHeader node)
// pair whose normalized names match, plus self-loops everywhere. Header
// names normalize by stripping an aggregate wrapper, a table qualifier,
// whitespace, and ASCII case, so "AVG(t.c)" links the column node "t.c".
UnifiedGraph unify(const UnifiedGraph& sql_g, const UnifiedGraph& table_g);

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view label) const = 0;
};

// CJK codepoints become single-character tokens; ASCII alphanumeric runs
// stay together; any other visible character is its own token.
class DefaultTokenizer : public Tokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view label) const override;
};

class TokenizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphToken {
  int id = 0;
  std::string text;
  int segment_id = 0;
  NodeKind kind = NodeKind::SqlKeyword;
};

struct TokenGraph {
  std::vector<GraphToken> tokens;
  std::set<std::pair<int, int>> edges;  // canonical (min,max), includes (i,i)
  int segment_count = 0;
};

// Expands each node into its tokens. Edge (n,v) with n != v turns into the
// complete bipartite set tokens(n) x tokens(v); the self-loop (v,v) turns
// into the complete graph over tokens(v) including per-token self-edges.
// Segment ids follow unified node ids, so segments partition the tokens.
TokenGraph tokenize_graph(const UnifiedGraph& g, const Tokenizer& tok);

// {"tokens":[{"text","segment","kind"},...],"edges":[[i,j],...]} with i<=j,
// edges sorted; import_graph(export_graph(tg)) reproduces tg exactly.
nlohmann::json export_graph(const TokenGraph& tg);
TokenGraph import_graph(const nlohmann::json& j);

// Dense symmetric adjacency with unit diagonal, indexed by token id.
std::vector<std::vector<std::uint8_t>> adjacency(const TokenGraph& tg);

}  // namespace catsforge
