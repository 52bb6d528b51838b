#include "doctest.h"

#include "catsforge/metrics.hpp"
#include "catsforge/strings.hpp"
#include "test_util.hpp"

using namespace catsforge;

TEST_SUITE_BEGIN("metrics");

namespace {

ResultTable table_2x2() {
  ResultTable rt;
  rt.headers = {"城市", "人口"};
  rt.rows = {{Value::text("北京"), Value::number(2154)},
             {Value::text("上海"), Value::number(2424)}};
  return rt;
}

Example make_example(std::size_t cols, std::size_t rows, const std::string& sql,
                     const std::string& reference) {
  Example ex;
  ex.id = "x";
  ex.sql = sql;
  for (std::size_t c = 0; c < cols; ++c) ex.table.headers.push_back("c" + std::to_string(c));
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<Value> row;
    for (std::size_t c = 0; c < cols; ++c) row.push_back(Value::number(static_cast<double>(r)));
    ex.table.rows.push_back(std::move(row));
  }
  ex.reference = reference;
  return ex;
}

}  // namespace

TEST_CASE("full coverage when every cell appears") {
  const std::string text = "城市北京人口2154，城市上海人口2424";
  const CoverageScore score = coverage(text, table_2x2());
  CHECK(score.total == 6);
  CHECK(score.covered == 6);
  CHECK(score.ratio() == 1.0);
}

TEST_CASE("empty text covers nothing") {
  const CoverageScore score = coverage("", table_2x2());
  CHECK(score.total == 6);
  CHECK(score.covered == 0);
  CHECK(score.ratio() == 0.0);
}

TEST_CASE("partial coverage counts by hand") {
  // mentions 北京 and 2154 plus both headers, misses the 上海 row
  const CoverageScore score = coverage("城市北京的人口是2154", table_2x2());
  CHECK(score.total == 6);
  CHECK(score.covered == 4);
}

TEST_CASE("whitespace normalization joins split mentions") {
  ResultTable rt;
  rt.headers = {"h"};
  rt.rows = {{Value::text("big apple")}};
  const CoverageScore score = coverage("the big  apple is h", rt);
  CHECK(score.covered == 2);
}

TEST_CASE("numeric cells match their canonical rendering") {
  ResultTable rt;
  rt.headers = {"率"};
  rt.rows = {{Value::number(4.5, "4.50")}};
  CHECK(coverage("比率为4.5", rt).covered == 2);  // header 率 is a substring too
  ResultTable raw;
  raw.headers = {"x"};
  raw.rows = {{Value::text("4.50")}};
  CHECK(coverage("值是4.5", raw).covered == 1);  // text cells re-parse numerically
}

TEST_CASE("coverage is monotone under appended text") {
  const ResultTable rt = table_2x2();
  std::string text;
  std::size_t last = 0;
  for (const char* part : {"城市", "北京", "人口2154", "上海", "2424"}) {
    text += part;
    const std::size_t covered = coverage(text, rt).covered;
    CHECK(covered >= last);
    last = covered;
  }
  CHECK(last == 6);
}

TEST_CASE("repetition follows the n-1 surplus rule") {
  ResultTable rt;
  rt.headers = {"n"};
  rt.rows = {{Value::number(7)}};
  CHECK(repetition("value 7", rt) == 0);
  CHECK(repetition("7 and 7 and 7", rt) == 2);
  CHECK(repetition("nothing here", rt) == 0);
}

TEST_CASE("repetition counts each cell against the shared text") {
  ResultTable rt;
  rt.headers = {"a", "b"};
  rt.rows = {{Value::text("高"), Value::text("低")}};
  // 高 twice -> surplus 1; 低 once -> 0
  CHECK(repetition("高高低", rt) == 1);
  // headers are not counted: repeating "a" changes nothing
  CHECK(repetition("a a a 高 低", rt) == 0);
}

TEST_CASE("repetition counts non-overlapping occurrences") {
  ResultTable rt;
  rt.headers = {"s"};
  rt.rows = {{Value::text("aa")}};
  CHECK(repetition("aaaa", rt) == 1);  // two non-overlapping "aa"
  CHECK(repetition("aaa", rt) == 0);   // only one fits
}

TEST_CASE("stats of a single small example hit the first bins") {
  const Example ex = make_example(1, 1, "SELECT c0 FROM t", "十个字的说明文本啊");
  const ComplexityStats stats = dataset_stats({ex});
  CHECK(stats.examples == 1);
  CHECK(stats.columns[0] == 1);
  CHECK(stats.rows[0] == 1);
  CHECK(stats.hardness[0] == 1);
  CHECK(stats.target_length[0] == 1);
  CHECK(stats.parse_failures == 0);
}

TEST_CASE("stats buckets are exhaustive and mutually exclusive") {
  std::vector<Example> examples;
  examples.push_back(make_example(1, 1, "SELECT c0 FROM t", std::string(10, 'x')));
  examples.push_back(make_example(2, 2, "SELECT c0, c1 FROM t WHERE c0 > 1",
                                  std::string(25, 'x')));
  examples.push_back(make_example(3, 3, "SELECT c0 FROM t", std::string(45, 'x')));
  examples.push_back(make_example(5, 9, "SELECT c0 FROM t", std::string(70, 'x')));
  const ComplexityStats stats = dataset_stats(examples);
  const auto sum = [](const std::array<std::size_t, 4>& a) {
    return a[0] + a[1] + a[2] + a[3];
  };
  CHECK(sum(stats.columns) == 4);
  CHECK(sum(stats.rows) == 4);
  CHECK(sum(stats.target_length) == 4);
  CHECK(sum(stats.hardness) + stats.parse_failures == 4);
  CHECK(stats.columns[3] == 1);  // the 5-column example lands in >=4
  CHECK(stats.rows[3] == 1);
  CHECK(stats.target_length[1] == 1);
  CHECK(stats.target_length[2] == 1);
  CHECK(stats.target_length[3] == 1);
}

TEST_CASE("unparsable SQL is excluded and counted separately") {
  std::vector<Example> examples;
  examples.push_back(make_example(1, 1, "SELECT c0 FROM t", "ok"));
  examples.push_back(make_example(1, 1, "NOT REALLY SQL", "bad"));
  const ComplexityStats stats = dataset_stats(examples);
  CHECK(stats.parse_failures == 1);
  CHECK(stats.hardness[0] == 1);
  CHECK(stats.examples == 2);
}

TEST_CASE("target length counts non-whitespace characters") {
  CHECK(count_non_whitespace_chars("十个字的说明文本啊") == 9);
  CHECK(count_non_whitespace_chars("a b  c") == 3);
  CHECK(count_non_whitespace_chars("") == 0);
}

TEST_CASE("corpus coverage is the mean of per-example ratios, in percent") {
  std::vector<CoverageScore> scores = {{3, 4, }, {1, 2, }};
  CHECK(corpus_coverage_percent(scores) == doctest::Approx(62.5));
  CHECK(corpus_coverage_percent({}) == 0.0);
}

TEST_SUITE_END();
