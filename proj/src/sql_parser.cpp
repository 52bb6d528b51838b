#include "catsforge/sql_parser.hpp"

#include <array>
#include <cstdlib>

#include "catsforge/strings.hpp"

namespace catsforge {

SyntaxError::SyntaxError(std::string message, std::size_t offset,
                         std::vector<std::string> expected)
    : std::runtime_error(message + " at byte " + std::to_string(offset)),
      offset_(offset),
      expected_(std::move(expected)) {}

namespace {

enum class Tok {
  Keyword,     // uppercased in `text`
  Identifier,  // verbatim
  Number,
  String,  // unescaped content in `text`
  Symbol,  // operators and punctuation, normalized in `text`
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double num = 0.0;
  std::size_t offset = 0;
};

constexpr std::array kKeywords = {
    "SELECT", "FROM", "WHERE", "GROUP", "ORDER", "BY",    "LIMIT",
    "AND",    "OR",   "NOT",   "IN",    "LIKE",  "UNION", "INTERSECT",
    "EXCEPT", "MIN",  "MAX",   "COUNT", "SUM",   "AVG",   "ASC",
    "DESC",
};

constexpr std::array kUnsupported = {
    "JOIN",   "ON",     "HAVING", "DISTINCT", "INSERT", "UPDATE", "DELETE",
    "CREATE", "DROP",   "ALTER",  "AS",       "BETWEEN", "EXISTS", "CASE",
    "LEFT",   "RIGHT",  "INNER",  "OUTER",    "CROSS",  "NULL",    "IS",
};

bool is_ident_char(char32_t cp) {
  if (cp < 0x80) {
    const char c = static_cast<char>(cp);
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_';
  }
  return !is_space_cp(cp) && cp != 0xFFFD;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { scan(); }

  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  void scan() {
    std::size_t i = 0;
    while (i < text_.size()) {
      std::size_t start = i;
      const char c = text_[i];
      if (static_cast<unsigned char>(c) < 0x80 && std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '\'') {
        scan_string(i);
        continue;
      }
      if ((c >= '0' && c <= '9') ||
          (c == '.' && i + 1 < text_.size() && text_[i + 1] >= '0' && text_[i + 1] <= '9')) {
        scan_number(i);
        continue;
      }
      if (std::string_view("=!<>+-*/(),.").find(c) != std::string_view::npos) {
        scan_symbol(i);
        continue;
      }
      std::size_t j = i;
      const char32_t cp = utf8_next(text_, j);
      if (is_ident_char(cp)) {
        scan_word(i);
        continue;
      }
      throw SyntaxError("unexpected character", start, {});
    }
    tokens_.push_back({Tok::End, "", 0.0, text_.size()});
  }

  void scan_string(std::size_t& i) {
    const std::size_t start = i;
    ++i;  // opening quote
    std::string out;
    while (true) {
      if (i >= text_.size()) throw SyntaxError("unterminated string literal", start, {"'"});
      if (text_[i] == '\'') {
        if (i + 1 < text_.size() && text_[i + 1] == '\'') {
          out.push_back('\'');
          i += 2;
          continue;
        }
        ++i;
        break;
      }
      out.push_back(text_[i++]);
    }
    tokens_.push_back({Tok::String, std::move(out), 0.0, start});
  }

  void scan_number(std::size_t& i) {
    const std::size_t start = i;
    while (i < text_.size() &&
           ((text_[i] >= '0' && text_[i] <= '9') || text_[i] == '.')) {
      ++i;
    }
    const std::string lexeme(text_.substr(start, i - start));
    tokens_.push_back({Tok::Number, lexeme, std::strtod(lexeme.c_str(), nullptr), start});
  }

  void scan_symbol(std::size_t& i) {
    const std::size_t start = i;
    const char c = text_[i];
    std::string sym(1, c);
    ++i;
    const auto two = [&](char second, const char* normalized) {
      if (i < text_.size() && text_[i] == second) {
        ++i;
        sym = normalized;
        return true;
      }
      return false;
    };
    switch (c) {
      case '=': two('=', "=");  // '==' accepted, normalized to '='
        break;
      case '!':
        if (!two('=', "!=")) throw SyntaxError("stray '!'", start, {"!="});
        break;
      case '<':
        if (!two('=', "<=")) two('>', "!=");  // '<>' accepted as '!='
        break;
      case '>': two('=', ">=");
        break;
      default: break;
    }
    tokens_.push_back({Tok::Symbol, std::move(sym), 0.0, start});
  }

  void scan_word(std::size_t& i) {
    const std::size_t start = i;
    while (i < text_.size()) {
      std::size_t j = i;
      const char32_t cp = utf8_next(text_, j);
      if (!is_ident_char(cp)) break;
      i = j;
    }
    std::string word(text_.substr(start, i - start));
    std::string upper = word;
    for (char& ch : upper) {
      if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
    }
    for (const char* kw : kKeywords) {
      if (upper == kw) {
        tokens_.push_back({Tok::Keyword, upper, 0.0, start});
        return;
      }
    }
    for (const char* kw : kUnsupported) {
      if (upper == kw) {
        throw UnsupportedFeature("keyword '" + upper + "' is outside the SQL subset");
      }
    }
    tokens_.push_back({Tok::Identifier, std::move(word), 0.0, start});
  }

  std::string_view text_;
  std::vector<Token> tokens_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) {}

  SqlAst parse() {
    SqlAst ast = parse_compound();
    expect_end();
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const auto& toks = lexer_.tokens();
    const std::size_t i = pos_ + ahead;
    return i < toks.size() ? toks[i] : toks.back();
  }

  const Token& advance() { return lexer_.tokens()[pos_++]; }

  bool at_keyword(std::string_view kw) const {
    return peek().kind == Tok::Keyword && peek().text == kw;
  }

  bool eat_keyword(std::string_view kw) {
    if (!at_keyword(kw)) return false;
    ++pos_;
    return true;
  }

  bool at_symbol(std::string_view sym) const {
    return peek().kind == Tok::Symbol && peek().text == sym;
  }

  bool eat_symbol(std::string_view sym) {
    if (!at_symbol(sym)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string got = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
    throw SyntaxError("expected " + join(expected, " or ") + ", got " + got, peek().offset,
                      std::move(expected));
  }

  void expect_keyword(std::string_view kw) {
    if (!eat_keyword(kw)) fail({std::string(kw)});
  }

  void expect_symbol(std::string_view sym) {
    if (!eat_symbol(sym)) fail({std::string(sym)});
  }

  void expect_end() {
    if (peek().kind != Tok::End) fail({"end of input"});
  }

  std::string expect_identifier() {
    if (peek().kind != Tok::Identifier) fail({"identifier"});
    return advance().text;
  }

  // sqls := query (setop query)*   (left-associative)
  SqlAst parse_compound() {
    SqlAst lhs = parse_query();
    while (true) {
      SetOp op;
      if (eat_keyword("UNION")) {
        op = SetOp::Union;
      } else if (eat_keyword("INTERSECT")) {
        op = SetOp::Intersect;
      } else if (eat_keyword("EXCEPT")) {
        op = SetOp::Except;
      } else {
        break;
      }
      SqlAst rhs = parse_query();
      SqlAst node;
      SqlAst::Compound compound;
      compound.op = op;
      compound.lhs = std::make_unique<SqlAst>(std::move(lhs));
      compound.rhs = std::make_unique<SqlAst>(std::move(rhs));
      node.compound = std::move(compound);
      lhs = std::move(node);
    }
    return lhs;
  }

  SqlAst parse_query() {
    if (eat_symbol("(")) {
      SqlAst inner = parse_compound();
      expect_symbol(")");
      return inner;
    }
    expect_keyword("SELECT");
    SqlAst ast;
    auto& core = ast.select;
    core.select_items.push_back(parse_agg_expr());
    while (eat_symbol(",")) core.select_items.push_back(parse_agg_expr());
    expect_keyword("FROM");
    core.from_tables.push_back(expect_identifier());
    while (eat_symbol(",")) core.from_tables.push_back(expect_identifier());
    if (eat_keyword("WHERE")) core.where = parse_or_condition();
    if (eat_keyword("GROUP")) {
      expect_keyword("BY");
      core.group_by.push_back(parse_column_ref());
      while (eat_symbol(",")) core.group_by.push_back(parse_column_ref());
    }
    if (eat_keyword("ORDER")) {
      expect_keyword("BY");
      AggExpr expr = parse_agg_expr();
      SortDir dir = SortDir::Asc;
      if (eat_keyword("DESC")) {
        dir = SortDir::Desc;
      } else {
        eat_keyword("ASC");
      }
      core.order_by = {std::move(expr), dir};
    }
    if (eat_keyword("LIMIT")) {
      if (peek().kind != Tok::Number) fail({"number"});
      core.limit = static_cast<long long>(advance().num);
    }
    return ast;
  }

  ColumnRef parse_column_ref() {
    ColumnRef ref;
    ref.column = expect_identifier();
    if (eat_symbol(".")) {
      ref.table = std::move(ref.column);
      ref.column = expect_identifier();
    }
    return ref;
  }

  std::optional<AggFn> peek_agg() {
    if (peek().kind != Tok::Keyword) return std::nullopt;
    const std::string& kw = peek().text;
    if (kw == "MIN") return AggFn::Min;
    if (kw == "MAX") return AggFn::Max;
    if (kw == "COUNT") return AggFn::Count;
    if (kw == "SUM") return AggFn::Sum;
    if (kw == "AVG") return AggFn::Avg;
    return std::nullopt;
  }

  AggExpr parse_agg_expr() {
    AggExpr expr;
    if (auto agg = peek_agg()) {
      advance();
      expr.agg = agg;
      expect_symbol("(");
      parse_col_expr(expr);
      expect_symbol(")");
      return expr;
    }
    parse_col_expr(expr);
    return expr;
  }

  void parse_col_expr(AggExpr& expr) {
    expr.lhs = parse_column_ref();
    for (const char* op : {"+", "-", "*", "/"}) {
      if (eat_symbol(op)) {
        expr.op = op[0] == '+'   ? MathOp::Add
                  : op[0] == '-' ? MathOp::Sub
                  : op[0] == '*' ? MathOp::Mul
                                 : MathOp::Div;
        expr.rhs = parse_column_ref();
        return;
      }
    }
  }

  // OR binds loosest; chains flatten into one n-ary node.
  Condition parse_or_condition() {
    Condition first = parse_and_condition();
    if (!at_keyword("OR")) return first;
    Condition::Node node;
    node.conn = Connector::Or;
    node.children.push_back(std::move(first));
    while (eat_keyword("OR")) node.children.push_back(parse_and_condition());
    Condition out;
    out.v = std::move(node);
    return out;
  }

  Condition parse_and_condition() {
    Condition first = parse_condition_atom();
    if (!at_keyword("AND")) return first;
    Condition::Node node;
    node.conn = Connector::And;
    node.children.push_back(std::move(first));
    while (eat_keyword("AND")) node.children.push_back(parse_condition_atom());
    Condition out;
    out.v = std::move(node);
    return out;
  }

  Condition parse_condition_atom() {
    if (at_symbol("(") && !is_subquery_paren()) {
      expect_symbol("(");
      Condition inner = parse_or_condition();
      expect_symbol(")");
      return inner;
    }
    Condition::Leaf leaf;
    leaf.lhs = parse_agg_expr();
    leaf.op = parse_cmp_op();
    if (leaf.op == CmpOp::In || leaf.op == CmpOp::NotIn) {
      expect_symbol("(");
      if (at_keyword("SELECT")) {
        leaf.subquery = std::make_unique<SqlAst>(parse_compound());
      } else {
        leaf.values.push_back(parse_literal());
        while (eat_symbol(",")) leaf.values.push_back(parse_literal());
      }
      expect_symbol(")");
    } else if (eat_symbol("(")) {
      if (!at_keyword("SELECT")) fail({"SELECT"});
      leaf.subquery = std::make_unique<SqlAst>(parse_compound());
      expect_symbol(")");
    } else {
      leaf.values.push_back(parse_literal());
    }
    if (leaf.op == CmpOp::Like && !leaf.subquery &&
        leaf.values.front().kind != Literal::Kind::String) {
      fail({"string literal"});
    }
    Condition out;
    out.v = std::move(leaf);
    return out;
  }

  // A '(' right after WHERE may open either a grouped condition or a
  // parenthesized subquery; only SELECT can follow for the latter.
  bool is_subquery_paren() const {
    return peek(1).kind == Tok::Keyword && peek(1).text == "SELECT";
  }

  CmpOp parse_cmp_op() {
    if (eat_keyword("LIKE")) return CmpOp::Like;
    if (eat_keyword("IN")) return CmpOp::In;
    if (eat_keyword("NOT")) {
      expect_keyword("IN");
      return CmpOp::NotIn;
    }
    if (peek().kind == Tok::Symbol) {
      const std::string& sym = peek().text;
      if (sym == "=") return advance(), CmpOp::Eq;
      if (sym == "!=") return advance(), CmpOp::Ne;
      if (sym == ">") return advance(), CmpOp::Gt;
      if (sym == ">=") return advance(), CmpOp::Ge;
      if (sym == "<") return advance(), CmpOp::Lt;
      if (sym == "<=") return advance(), CmpOp::Le;
    }
    fail({"comparison operator"});
  }

  Literal parse_literal() {
    if (peek().kind == Tok::Number) return Literal::number(advance().num);
    if (peek().kind == Tok::String) return Literal::string(advance().text);
    if (at_symbol("-") && peek(1).kind == Tok::Number) {
      advance();
      return Literal::number(-advance().num);
    }
    fail({"literal"});
  }

  Lexer lexer_;
  std::size_t pos_ = 0;
};

}  // namespace

SqlAst parse_sql(std::string_view text) { return Parser(text).parse(); }

bool lexes_as_identifier(std::string_view name) {
  if (name.empty()) return false;
  const char first = name.front();
  if (first >= '0' && first <= '9') return false;
  std::size_t i = 0;
  while (i < name.size()) {
    const std::size_t start = i;
    const char32_t cp = utf8_next(name, i);
    if (cp < 0x80 &&
        std::string_view(" \t\r\n'\"=!<>+-*/(),.").find(static_cast<char>(cp)) !=
            std::string_view::npos) {
      return false;
    }
    if (!is_ident_char(cp)) return false;
    (void)start;
  }
  std::string upper(name);
  for (char& c : upper) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  for (const char* kw : kKeywords) {
    if (upper == kw) return false;
  }
  for (const char* kw : kUnsupported) {
    if (upper == kw) return false;
  }
  return true;
}

}  // namespace catsforge
