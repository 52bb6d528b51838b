#include <algorithm>

#include "doctest.h"

#include "catsforge/sql_exec.hpp"
#include "catsforge/sql_parser.hpp"
#include "catsforge/sql_synth.hpp"
#include "exec_oracle.hpp"
#include "test_util.hpp"

using namespace catsforge;
using testutil::make_table;
using testutil::single_table_db;

TEST_SUITE_BEGIN("sql_exec");

namespace {

std::vector<std::vector<std::string>> row_strings(const ResultTable& rt) {
  std::vector<std::vector<std::string>> out;
  for (const auto& row : rt.rows) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(v.is_null() ? "<null>" : v.str());
    out.push_back(std::move(cells));
  }
  return out;
}

std::vector<std::vector<std::string>> sorted_rows(const ResultTable& rt) {
  auto rows = row_strings(rt);
  std::sort(rows.begin(), rows.end());
  return rows;
}

Database numbers_db() {
  return single_table_db(make_table(
      "t", {{"c", CType::Number}, {"name", CType::Text}},
      {{"3", "a"}, {"7", "b"}, {"9", "c"}}));
}

}  // namespace

TEST_CASE("COUNT over a column with no nulls") {
  const ResultTable rt = execute(parse_sql("SELECT COUNT(c) FROM t"), numbers_db());
  REQUIRE(rt.rows.size() == 1);
  CHECK(rt.rows[0][0].str() == "3");
  CHECK(rt.headers[0] == "COUNT(c)");
}

TEST_CASE("WHERE c > 5 keeps 7 and 9") {
  const ResultTable rt = execute(parse_sql("SELECT c FROM t WHERE c > 5"), numbers_db());
  CHECK(row_strings(rt) == std::vector<std::vector<std::string>>{{"7"}, {"9"}});
}

TEST_CASE("is_empty distinguishes zero-row results") {
  CHECK_FALSE(is_empty(execute(parse_sql("SELECT c FROM t"), numbers_db())));
  CHECK(is_empty(execute(parse_sql("SELECT c FROM t WHERE c > 100"), numbers_db())));
  // contradiction built via the oracle: both agree it is empty
  const SqlAst contradiction = parse_sql("SELECT c FROM t WHERE c > 5 AND c < 4");
  CHECK(is_empty(execute(contradiction, numbers_db())));
  CHECK(is_empty(oracle::evaluate(contradiction, numbers_db())));
}

TEST_CASE("aggregates skip nulls; COUNT of none is 0") {
  const Database db = single_table_db(
      make_table("t", {{"c", CType::Number}}, {{""}, {"4"}, {""}, {"6"}}));
  const ResultTable rt =
      execute(parse_sql("SELECT COUNT(c), SUM(c), AVG(c), MIN(c), MAX(c) FROM t"), db);
  CHECK(rt.rows[0][0].str() == "2");
  CHECK(rt.rows[0][1].str() == "10");
  CHECK(rt.rows[0][2].str() == "5");
  CHECK(rt.rows[0][3].str() == "4");
  CHECK(rt.rows[0][4].str() == "6");

  const ResultTable none =
      execute(parse_sql("SELECT COUNT(c), SUM(c) FROM t WHERE c > 100"), db);
  CHECK(none.rows[0][0].str() == "0");
  CHECK(none.rows[0][1].is_null());
}

TEST_CASE("AVG renders two decimals canonically") {
  const Database db = single_table_db(
      make_table("t", {{"c", CType::Number}}, {{"1"}, {"2"}, {"4"}}));
  const ResultTable rt = execute(parse_sql("SELECT AVG(c) FROM t"), db);
  CHECK(rt.rows[0][0].str() == "2.33");
}

TEST_CASE("GROUP BY partitions in first-occurrence order") {
  const Database db = single_table_db(make_table(
      "t", {{"city", CType::Text}, {"pop", CType::Number}},
      {{"北京", "3"}, {"上海", "5"}, {"北京", "7"}}));
  const ResultTable rt =
      execute(parse_sql("SELECT city, SUM(pop) FROM t GROUP BY city"), db);
  CHECK(row_strings(rt) ==
        std::vector<std::vector<std::string>>{{"北京", "10"}, {"上海", "5"}});
}

TEST_CASE("ORDER BY is stable with nulls last and original-index ties") {
  const Database db = single_table_db(make_table(
      "t", {{"c", CType::Number}, {"name", CType::Text}},
      {{"2", "first"}, {"", "null_row"}, {"2", "second"}, {"1", "third"}}));
  const ResultTable asc = execute(parse_sql("SELECT name FROM t ORDER BY c ASC"), db);
  CHECK(row_strings(asc) == std::vector<std::vector<std::string>>{
                                {"third"}, {"first"}, {"second"}, {"null_row"}});
  const ResultTable desc = execute(parse_sql("SELECT name FROM t ORDER BY c DESC"), db);
  CHECK(row_strings(desc) == std::vector<std::vector<std::string>>{
                                 {"first"}, {"second"}, {"third"}, {"null_row"}});
}

TEST_CASE("ORDER BY result is invariant under source-row permutation") {
  const std::vector<std::vector<std::string>> rows = {
      {"5", "a"}, {"3", "b"}, {"9", "c"}, {"3", "d"}};
  std::vector<std::vector<std::string>> permuted = {rows[2], rows[0], rows[3], rows[1]};
  const auto db1 = single_table_db(
      make_table("t", {{"c", CType::Number}, {"name", CType::Text}}, rows));
  const auto db2 = single_table_db(
      make_table("t", {{"c", CType::Number}, {"name", CType::Text}}, permuted));
  const SqlAst ast = parse_sql("SELECT c FROM t ORDER BY c ASC");
  CHECK(row_strings(execute(ast, db1)) == row_strings(execute(ast, db2)));
}

TEST_CASE("implicit join follows database links") {
  Database db;
  db.name = "joined";
  db.tables.push_back(make_table("cities", {{"city", CType::Text}, {"pop", CType::Number}},
                                 {{"北京", "2154"}, {"上海", "2424"}, {"广州", "1868"}}));
  db.tables.push_back(make_table("gdp", {{"city", CType::Text}, {"gdp", CType::Number}},
                                 {{"北京", "4.0"}, {"上海", "4.3"}}));
  db.links.push_back({"cities", "city", "gdp", "city"});
  const ResultTable rt = execute(
      parse_sql("SELECT cities.city, gdp.gdp FROM cities, gdp ORDER BY gdp.gdp DESC"), db);
  CHECK(row_strings(rt) ==
        std::vector<std::vector<std::string>>{{"上海", "4.3"}, {"北京", "4"}});
}

TEST_CASE("unlinked FROM tables raise NoJoinPath") {
  Database db;
  db.tables.push_back(make_table("a", {{"x", CType::Number}}, {{"1"}}));
  db.tables.push_back(make_table("b", {{"y", CType::Number}}, {{"2"}}));
  try {
    execute(parse_sql("SELECT x, y FROM a, b"), db);
    FAIL("expected ExecError");
  } catch (const ExecError& e) {
    CHECK(e.kind() == ExecError::Kind::NoJoinPath);
  }
}

TEST_CASE("division by zero raises the dedicated error") {
  const Database db = single_table_db(
      make_table("t", {{"a", CType::Number}, {"b", CType::Number}}, {{"4", "0"}}));
  try {
    execute(parse_sql("SELECT a / b FROM t"), db);
    FAIL("expected ExecError");
  } catch (const ExecError& e) {
    CHECK(e.kind() == ExecError::Kind::DivisionByZero);
  }
}

TEST_CASE("set-op algebra: A UNION A == A and A EXCEPT A is empty") {
  const Database db = numbers_db();
  const ResultTable a = execute(parse_sql("SELECT c FROM t"), db);
  const ResultTable aa = execute(parse_sql("SELECT c FROM t UNION SELECT c FROM t"), db);
  CHECK(sorted_rows(a) == sorted_rows(aa));
  CHECK(is_empty(execute(parse_sql("SELECT c FROM t EXCEPT SELECT c FROM t"), db)));
  const ResultTable ii =
      execute(parse_sql("SELECT c FROM t INTERSECT SELECT c FROM t"), db);
  CHECK(sorted_rows(ii) == sorted_rows(a));
}

TEST_CASE("scalar subqueries compare against the single aggregate row") {
  const ResultTable rt = execute(
      parse_sql("SELECT c FROM t WHERE c > (SELECT AVG(c) FROM t)"), numbers_db());
  CHECK(row_strings(rt) == std::vector<std::vector<std::string>>{{"7"}, {"9"}});
}

TEST_CASE("differential: 1000 random pairs match the brute-force oracle") {
  Rng rng(20240817);
  GenConfig cfg;
  cfg.max_attempts_per_example = 60;
  std::size_t checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Database db = oracle::random_db(rng);
    SqlAst ast;
    try {
      ast = generate_sql(db, cfg, rng);
    } catch (const GenFailure&) {
      continue;
    }
    CAPTURE(print_sql(ast));
    bool exec_failed = false, oracle_failed = false;
    ExecError::Kind exec_kind{}, oracle_kind{};
    ResultTable got, want;
    try {
      got = execute(ast, db);
    } catch (const ExecError& e) {
      exec_failed = true;
      exec_kind = e.kind();
    }
    try {
      want = oracle::evaluate(ast, db);
    } catch (const ExecError& e) {
      oracle_failed = true;
      oracle_kind = e.kind();
    }
    REQUIRE(exec_failed == oracle_failed);
    if (exec_failed) {
      CHECK(exec_kind == oracle_kind);
      continue;
    }
    REQUIRE(got.headers == want.headers);
    REQUIRE(sorted_rows(got) == sorted_rows(want));
    ++checked;
  }
  CHECK(checked > 700);  // most random pairs should execute cleanly
}

TEST_SUITE_END();
