#include "doctest.h"

#include "catsforge/sql_parser.hpp"

using namespace catsforge;

TEST_SUITE_BEGIN("sql_parser");

TEST_CASE("minimal production") {
  const SqlAst ast = parse_sql("SELECT c FROM t");
  REQUIRE(ast.select.select_items.size() == 1);
  CHECK(ast.select.select_items[0].lhs.column == "c");
  CHECK_FALSE(ast.select.select_items[0].agg.has_value());
  REQUIRE(ast.select.from_tables.size() == 1);
  CHECK(ast.select.from_tables[0] == "t");
  CHECK_FALSE(ast.select.where.has_value());
}

TEST_CASE("leaf condition with '>' binds the literal") {
  const SqlAst ast = parse_sql("SELECT c FROM t WHERE c > 5");
  REQUIRE(ast.select.where.has_value());
  REQUIRE(ast.select.where->is_leaf());
  const auto& leaf = ast.select.where->leaf();
  CHECK(leaf.op == CmpOp::Gt);
  REQUIRE(leaf.values.size() == 1);
  CHECK(leaf.values[0].kind == Literal::Kind::Number);
  CHECK(leaf.values[0].num == 5.0);
}

TEST_CASE("keywords are case-insensitive, identifiers verbatim") {
  const SqlAst ast = parse_sql("select 城市 from 居民表 where 城市 like '%京%'");
  CHECK(ast.select.select_items[0].lhs.column == "城市");
  CHECK(ast.select.from_tables[0] == "居民表");
  CHECK(ast.select.where->leaf().op == CmpOp::Like);
  CHECK(ast.select.where->leaf().values[0].text == "%京%");
}

TEST_CASE("operator aliases normalize") {
  CHECK(parse_sql("SELECT c FROM t WHERE c == 1").select.where->leaf().op == CmpOp::Eq);
  CHECK(parse_sql("SELECT c FROM t WHERE c <> 1").select.where->leaf().op == CmpOp::Ne);
}

TEST_CASE("AND binds tighter than OR and chains flatten") {
  const SqlAst ast = parse_sql("SELECT c FROM t WHERE c > 1 AND c < 9 OR c = 0");
  REQUIRE(!ast.select.where->is_leaf());
  const auto& top = ast.select.where->node();
  CHECK(top.conn == Connector::Or);
  REQUIRE(top.children.size() == 2);
  CHECK_FALSE(top.children[0].is_leaf());
  CHECK(top.children[0].node().conn == Connector::And);
  CHECK(top.children[0].node().children.size() == 2);
  CHECK(top.children[1].is_leaf());
}

TEST_CASE("IN lists, IN subqueries and scalar subqueries") {
  SqlAst ast = parse_sql("SELECT c FROM t WHERE c IN (1, 2, 3)");
  CHECK(ast.select.where->leaf().values.size() == 3);

  ast = parse_sql("SELECT c FROM t WHERE c NOT IN (SELECT c FROM u)");
  CHECK(ast.select.where->leaf().op == CmpOp::NotIn);
  REQUIRE(ast.select.where->leaf().subquery != nullptr);
  CHECK(ast.select.where->leaf().subquery->select.from_tables[0] == "u");

  ast = parse_sql("SELECT c FROM t WHERE c > (SELECT AVG(c) FROM t)");
  REQUIRE(ast.select.where->leaf().subquery != nullptr);
  CHECK(ast.select.where->leaf().subquery->select.select_items[0].agg == AggFn::Avg);
}

TEST_CASE("set operations associate to the left") {
  const SqlAst ast =
      parse_sql("SELECT c FROM t UNION SELECT c FROM u EXCEPT SELECT c FROM v");
  REQUIRE(ast.is_compound());
  CHECK(ast.compound->op == SetOp::Except);
  REQUIRE(ast.compound->lhs->is_compound());
  CHECK(ast.compound->lhs->compound->op == SetOp::Union);
}

TEST_CASE("string escapes round-trip") {
  const SqlAst ast = parse_sql("SELECT c FROM t WHERE name = 'it''s'");
  CHECK(ast.select.where->leaf().values[0].text == "it's");
  const std::string printed = print_sql(ast);
  CHECK(equal(parse_sql(printed), ast));
}

TEST_CASE("syntax errors carry byte offsets and expectations") {
  try {
    parse_sql("SELECT c FROM");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 13);
    REQUIRE(!e.expected().empty());
    CHECK(e.expected()[0] == "identifier");
  }
  try {
    parse_sql("SELECT c FROM t WHERE");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 21);
  }
  CHECK_THROWS_AS(parse_sql("c FROM t"), SyntaxError);
  CHECK_THROWS_AS(parse_sql("SELECT c FROM t GARBAGE trailing"), SyntaxError);
  CHECK_THROWS_AS(parse_sql("SELECT c FROM t WHERE name = 'open"), SyntaxError);
}

TEST_CASE("out-of-subset SQL raises UnsupportedFeature") {
  CHECK_THROWS_AS(parse_sql("SELECT DISTINCT c FROM t"), UnsupportedFeature);
  CHECK_THROWS_AS(parse_sql("SELECT c FROM t JOIN u ON t.c = u.c"), UnsupportedFeature);
  CHECK_THROWS_AS(parse_sql("SELECT c FROM t GROUP BY c HAVING COUNT(c) > 1"),
                  UnsupportedFeature);
  CHECK_THROWS_AS(parse_sql("INSERT INTO t VALUES (1)"), UnsupportedFeature);
}

TEST_CASE("identifier lexing guard") {
  CHECK(lexes_as_identifier("city"));
  CHECK(lexes_as_identifier("城市名称"));
  CHECK(lexes_as_identifier("col_2"));
  CHECK_FALSE(lexes_as_identifier("two words"));
  CHECK_FALSE(lexes_as_identifier("2021年"));
  CHECK_FALSE(lexes_as_identifier("a+b"));
  CHECK_FALSE(lexes_as_identifier("select"));
  CHECK_FALSE(lexes_as_identifier("t.c"));
  CHECK_FALSE(lexes_as_identifier(""));
}

TEST_SUITE_END();
