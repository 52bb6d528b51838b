#include "doctest.h"

#include "catsforge/sql_ast.hpp"
#include "catsforge/sql_parser.hpp"
#include "test_util.hpp"

using namespace catsforge;
using testutil::make_table;
using testutil::single_table_db;

TEST_SUITE_BEGIN("sql_ast");

namespace {

SqlAst q(const char* text) { return parse_sql(text); }

Database toy_db() {
  Database db;
  db.name = "toy";
  db.tables.push_back(make_table(
      "t", {{"c", CType::Number}, {"name", CType::Text}, {"day", CType::Time}},
      {{"1", "a", "2021-01-02"}, {"2", "b", "2021-02-03"}}));
  db.tables.push_back(make_table("u", {{"c", CType::Number}, {"tag", CType::Text}},
                                 {{"1", "x"}, {"3", "y"}}));
  db.links.push_back({"t", "c", "u", "c"});
  return db;
}

}  // namespace

TEST_CASE("printer renders the minimal query") {
  SqlAst ast;
  AggExpr item;
  item.lhs.column = "c";
  ast.select.select_items.push_back(item);
  ast.select.from_tables.push_back("t");
  CHECK(print_sql(ast) == "SELECT c FROM t");
}

TEST_CASE("printer spells aggregate and sort keywords") {
  const std::string s = print_sql(q("select avg(c) from t order by avg(c) desc"));
  CHECK(s.find("AVG(") != std::string::npos);
  CHECK(s.find("ORDER BY AVG(c) DESC") != std::string::npos);
}

TEST_CASE("print is a fixed point after one parse") {
  const char* samples[] = {
      "SELECT c FROM t",
      "SELECT c, name FROM t WHERE c > 5 ORDER BY c DESC LIMIT 3",
      "SELECT AVG(c) FROM t GROUP BY name",
      "SELECT c FROM t WHERE name LIKE '%ab%' AND c <= 4",
      "SELECT c FROM t WHERE c IN (1, 2, 3) OR name = 'x''y'",
      "SELECT c FROM t WHERE c IN (SELECT c FROM u)",
      "SELECT c FROM t UNION SELECT c FROM u",
      "SELECT t.c, u.tag FROM t, u WHERE t.c != 2",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    const std::string once = print_sql(q(s));
    CHECK(print_sql(q(once.c_str())) == once);
  }
}

TEST_CASE("hardness: documented component counts") {
  CHECK(classify_hardness(q("SELECT c FROM t")) == Hardness::Easy);

  const Hardness except_level =
      classify_hardness(q("SELECT c FROM t EXCEPT SELECT c FROM u"));
  CHECK((except_level == Hardness::Hard || except_level == Hardness::ExtraHard));

  // three SELECT columns + three WHERE conditions + GROUP BY two columns
  CHECK(classify_hardness(
            q("SELECT c, name, day FROM t WHERE c > 1 AND c < 9 AND name != 'x' "
              "GROUP BY c, name")) == Hardness::Hard);
}

TEST_CASE("hardness: single features stay easy, stacked features escalate") {
  CHECK(classify_hardness(q("SELECT c FROM t WHERE c > 5")) == Hardness::Easy);
  CHECK(classify_hardness(q("SELECT c FROM t ORDER BY c DESC")) == Hardness::Easy);
  CHECK(classify_hardness(q("SELECT MAX(c) FROM t")) == Hardness::Easy);
  CHECK(classify_hardness(q("SELECT c, name FROM t WHERE c > 5")) == Hardness::Medium);
  CHECK(classify_hardness(q("SELECT c FROM t WHERE c IN (SELECT c FROM u)")) ==
        Hardness::Hard);
}

TEST_CASE("hardness is monotone under appended conditions and set ops") {
  const char* bases[] = {
      "SELECT c FROM t",
      "SELECT c, name FROM t WHERE c > 1",
      "SELECT AVG(c) FROM t GROUP BY name ORDER BY AVG(c) DESC LIMIT 2",
      "SELECT c FROM t WHERE c IN (SELECT c FROM u)",
  };
  for (const char* base : bases) {
    CAPTURE(base);
    SqlAst ast = q(base);
    const Hardness before = classify_hardness(ast);

    // append one WHERE leaf
    SqlAst widened = clone(ast);
    Condition::Leaf extra;
    extra.lhs.lhs.column = "c";
    extra.op = CmpOp::Ge;
    extra.values.push_back(Literal::number(0));
    if (!widened.select.where) {
      widened.select.where = Condition(std::move(extra));
    } else {
      Condition::Node node;
      node.conn = Connector::And;
      node.children.push_back(std::move(*widened.select.where));
      node.children.push_back(Condition(std::move(extra)));
      widened.select.where = Condition(std::move(node));
    }
    CHECK(classify_hardness(widened) >= before);

    // wrap in a set operation
    SqlAst unioned;
    SqlAst::Compound compound;
    compound.op = SetOp::Union;
    compound.lhs = std::make_unique<SqlAst>(clone(ast));
    compound.rhs = std::make_unique<SqlAst>(q("SELECT c FROM u"));
    unioned.compound = std::move(compound);
    CHECK(classify_hardness(unioned) >= before);
  }
}

TEST_CASE("hardness is a pure function") {
  const SqlAst ast = q("SELECT c, name FROM t WHERE c > 1 OR c < 0");
  CHECK(classify_hardness(ast) == classify_hardness(ast));
  CHECK(classify_hardness(ast) == classify_hardness(clone(ast)));
}

TEST_CASE("validation accepts a well-formed query") {
  CHECK(validate_schema(q("SELECT c, name FROM t WHERE c > 1"), toy_db()).empty());
  CHECK(validate_schema(q("SELECT t.c, u.tag FROM t, u"), toy_db()).empty());
  CHECK(validate_schema(q("SELECT name, AVG(c) FROM t GROUP BY name"), toy_db()).empty());
}

TEST_CASE("validation flags unknown and ambiguous references") {
  auto errors = validate_schema(q("SELECT missing FROM t"), toy_db());
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].kind == SchemaError::Kind::UnknownColumn);

  errors = validate_schema(q("SELECT c FROM t, u"), toy_db());
  REQUIRE(!errors.empty());
  CHECK(errors[0].kind == SchemaError::Kind::AmbiguousColumn);

  errors = validate_schema(q("SELECT c FROM nowhere"), toy_db());
  REQUIRE(!errors.empty());
  CHECK(errors[0].kind == SchemaError::Kind::UnknownTable);
}

TEST_CASE("validation: SUM over a Text column is a type mismatch") {
  const auto errors = validate_schema(q("SELECT SUM(name) FROM t"), toy_db());
  REQUIRE(!errors.empty());
  CHECK(errors[0].kind == SchemaError::Kind::TypeMismatch);

  // independent type-inference oracle on a hand-built table: the column
  // really is Text, so the rejection is not a schema artifact
  const DataTable t = infer_column_types(
      make_table("t2", {{"name", CType::Text}}, {{"a"}, {"b"}, {"c"}}));
  CHECK(t.columns[0].type == CType::Text);
}

TEST_CASE("validation: arithmetic needs numeric operands") {
  const auto errors = validate_schema(q("SELECT c + name FROM t"), toy_db());
  REQUIRE(!errors.empty());
  CHECK(errors[0].kind == SchemaError::Kind::TypeMismatch);
}

TEST_CASE("validation: mixing bare and aggregated selects needs GROUP BY") {
  const auto errors = validate_schema(q("SELECT name, AVG(c) FROM t"), toy_db());
  REQUIRE(!errors.empty());
  CHECK(errors[0].kind == SchemaError::Kind::Malformed);
}

TEST_CASE("validation: set-op operands must agree on arity") {
  const auto errors =
      validate_schema(q("SELECT c, name FROM t UNION SELECT c FROM u"), toy_db());
  REQUIRE(!errors.empty());
  CHECK(errors.back().kind == SchemaError::Kind::BadSetOp);
}

TEST_CASE("validation: aggregates cannot appear in WHERE") {
  const auto errors = validate_schema(q("SELECT c FROM t WHERE AVG(c) > 1"), toy_db());
  REQUIRE(!errors.empty());
  CHECK(errors[0].kind == SchemaError::Kind::Malformed);
}

TEST_SUITE_END();
