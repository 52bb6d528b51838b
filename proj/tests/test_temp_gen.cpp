#include "doctest.h"

#include "catsforge/metrics.hpp"
#include "catsforge/sql_parser.hpp"
#include "catsforge/strings.hpp"
#include "catsforge/sql_synth.hpp"
#include "catsforge/temp_gen.hpp"
#include "exec_oracle.hpp"
#include "test_util.hpp"

using namespace catsforge;
using testutil::make_table;
using testutil::single_table_db;

TEST_SUITE_BEGIN("temp_gen");

namespace {

std::string describe(const char* sql, const Database& db) {
  const SqlAst ast = parse_sql(sql);
  return temp_describe(ast, execute(ast, db), Lexicon::defaults(), TemplateSet::defaults());
}

Database city_db() {
  return single_table_db(make_table(
      "城市表", {{"城市", CType::Text}, {"人口", CType::Number}},
      {{"北京", "2154"}, {"上海", "2424"}, {"广州", "1868"}}));
}

}  // namespace

TEST_CASE("condition rendering keeps column, operator phrase and value") {
  const std::string out = render_sql_description(
      parse_sql("SELECT 城市 FROM 城市表 WHERE 人口 > 2000"), Lexicon::defaults(),
      TemplateSet::defaults());
  CHECK(out.find("人口") != std::string::npos);
  CHECK(out.find("大于") != std::string::npos);  // the '>' phrase
  CHECK(out.find("2000") != std::string::npos);
  CHECK(out.find("城市表") != std::string::npos);
}

TEST_CASE("aggregate and sort phrases come from the lexicon") {
  const std::string avg = render_sql_description(
      parse_sql("SELECT AVG(人口) FROM 城市表"), Lexicon::defaults(), TemplateSet::defaults());
  CHECK(avg.find("平均") != std::string::npos);

  const std::string desc = render_sql_description(
      parse_sql("SELECT 城市 FROM 城市表 ORDER BY 人口 DESC"), Lexicon::defaults(),
      TemplateSet::defaults());
  CHECK(desc.find("从高到低") != std::string::npos);

  const std::string asc = render_sql_description(
      parse_sql("SELECT 城市 FROM 城市表 ORDER BY 人口 ASC"), Lexicon::defaults(),
      TemplateSet::defaults());
  CHECK(asc.find("从低到高") != std::string::npos);
}

TEST_CASE("table rendering enumerates every cell once, row-major") {
  ResultTable rt;
  rt.headers = {"a", "b"};
  rt.rows = {{Value::text("w"), Value::text("x")}, {Value::text("y"), Value::text("z")}};
  const std::string out = render_table_description(rt, TemplateSet::defaults());
  for (const char* cell : {"w", "x", "y", "z"}) {
    CAPTURE(cell);
    CHECK(count_occurrences(out, cell) == 1);
  }
  CHECK(out.find("w") < out.find("x"));
  CHECK(out.find("x") < out.find("y"));
  CHECK(out.find("y") < out.find("z"));
}

TEST_CASE("1x1 table renders its single cell") {
  ResultTable rt;
  rt.headers = {"n"};
  rt.rows = {{Value::number(7)}};
  const std::string out = render_table_description(rt, TemplateSet::defaults());
  CHECK(count_occurrences(out, "7") == 1);
}

TEST_CASE("temp_describe keeps both fragments in order and is deterministic") {
  const Database db = city_db();
  const std::string once = describe("SELECT 城市 FROM 城市表 WHERE 人口 > 2000", db);
  const std::string twice = describe("SELECT 城市 FROM 城市表 WHERE 人口 > 2000", db);
  CHECK(once == twice);
  CHECK(once.find("查询") != std::string::npos);
  CHECK(once.find("查询") < once.find("结果"));
  CHECK(once.find("北京") != std::string::npos);
  CHECK(once.find("上海") != std::string::npos);
}

TEST_CASE("temp output covers every body cell of the table") {
  const Database db = city_db();
  const SqlAst ast = parse_sql("SELECT 城市, 人口 FROM 城市表 ORDER BY 人口 DESC");
  const ResultTable rt = execute(ast, db);
  const std::string out = temp_describe(ast, rt, Lexicon::defaults(), TemplateSet::defaults());
  const CoverageScore score = coverage(out, rt);
  CHECK(score.covered == score.total);  // headers render too
}

TEST_CASE("cell totality holds over a generated corpus") {
  Rng rng(808);
  GenConfig cfg;
  const Lexicon lex = Lexicon::defaults();
  const TemplateSet ts = TemplateSet::defaults();
  int rendered = 0;
  for (int i = 0; i < 150; ++i) {
    const Database db = oracle::random_db(rng);
    SqlAst ast;
    ResultTable rt;
    try {
      ast = generate_sql(db, cfg, rng);
      rt = execute(ast, db);
    } catch (const std::exception&) {
      continue;
    }
    if (is_empty(rt)) continue;
    const std::string out = temp_describe(ast, rt, lex, ts);
    for (const auto& row : rt.rows) {
      for (const auto& cell : row) {
        if (cell.is_null() || cell.str().empty()) continue;
        CAPTURE(out);
        CAPTURE(cell.str());
        CHECK(out.find(cell.str()) != std::string::npos);
      }
    }
    ++rendered;
  }
  CHECK(rendered > 80);
}

TEST_CASE("lexicon totality check catches removed entries") {
  Lexicon broken = Lexicon::defaults();
  broken.entries.erase("avg");
  CHECK_THROWS_AS(broken.check_total(), MissingLexEntry);
  CHECK_THROWS_AS(
      render_sql_description(parse_sql("SELECT AVG(人口) FROM 城市表"), broken,
                             TemplateSet::defaults()),
      MissingLexEntry);
}

TEST_CASE("default lexicon is total over the synthesizable components") {
  CHECK_NOTHROW(Lexicon::defaults().check_total());
}

TEST_SUITE_END();
