#include <algorithm>
#include <set>

#include "doctest.h"

#include "catsforge/table.hpp"
#include "test_util.hpp"

using namespace catsforge;
using testutil::make_table;

TEST_SUITE_BEGIN("tabular");

namespace {

DataTable raw_table(std::string name, std::vector<std::string> headers,
                    std::vector<std::vector<std::string>> rows) {
  std::vector<std::pair<std::string, CType>> cols;
  for (auto& h : headers) cols.emplace_back(h, CType::Text);
  return make_table(std::move(name), std::move(cols), std::move(rows));
}

}  // namespace

TEST_CASE("type inference assigns the majority-parse type") {
  // hand-labelled mini corpus: column -> expected type
  const std::vector<std::pair<std::vector<std::string>, CType>> corpus = {
      {{"1", "2", "3"}, CType::Number},
      {{"yes", "no", "yes"}, CType::Bool},
      {{"2021-05-01", "2022-01-02"}, CType::Time},
      {{"alpha", "beta", "gamma"}, CType::Text},
      {{"1", "2", "many"}, CType::Number},          // 2/3 majority
      {{"1", "two", "three"}, CType::Text},         // 1/3 is no majority
      {{"2021-05-01", "yes", "maybe"}, CType::Text},
      {{"", "", "7"}, CType::Number},               // empties are skipped
      {{"", "", ""}, CType::Text},
  };
  for (const auto& [cells, expected] : corpus) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : cells) rows.push_back({c});
    const DataTable t = infer_column_types(raw_table("t", {"c"}, rows));
    CAPTURE(cells.front());
    CHECK(t.columns[0].type == expected);
  }
}

TEST_CASE("type inference re-parses cells under the winning type") {
  const DataTable t =
      infer_column_types(raw_table("t", {"n"}, {{"1"}, {"2.50"}, {"oops"}}));
  CHECK(t.columns[0].type == CType::Number);
  CHECK(t.rows[0][0].num() == 1.0);
  CHECK(t.rows[1][0].str() == "2.5");
  CHECK(t.rows[2][0].is_null());
}

TEST_CASE("type inference rejects empty tables") {
  DataTable t;
  t.name = "empty";
  t.columns.push_back({"c", CType::Text});
  CHECK_THROWS_AS(infer_column_types(t), EmptyTableError);
}

TEST_CASE("cleaning rule 3: fewer than 2 columns or rows") {
  const auto [kept, report] = clean_tables(
      {raw_table("one_col", {"a"}, {{"x"}, {"y"}}),
       raw_table("one_row", {"a", "b"}, {{"x", "y"}})},
      {});
  CHECK(kept.empty());
  REQUIRE(report.rejected.size() == 2);
  CHECK(report.rejected[0] == std::pair<std::string, int>{"one_col", 3});
  CHECK(report.rejected[1] == std::pair<std::string, int>{"one_row", 3});
  CHECK(report.input_count == 2);
  CHECK(report.kept_count == 0);
}

TEST_CASE("cleaning rule 2: all-Number table has 0% Text columns") {
  const auto [kept, report] = clean_tables(
      {raw_table("nums", {"a", "b", "c", "d"},
                 {{"1", "2", "3", "4"}, {"5", "6", "7", "8"}})},
      {});
  CHECK(kept.empty());
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0].second == 2);
}

TEST_CASE("cleaning rule 4: one value filling 7 of 12 cells") {
  const auto [kept, report] = clean_tables(
      {raw_table("dup", {"a", "b", "c"},
                 {{"x", "x", "x"}, {"x", "x", "x"}, {"x", "p", "q"}, {"r", "s", "t"}})},
      {});
  CHECK(kept.empty());
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0].second == 4);
}

TEST_CASE("cleaning rule 1: blacklist hits headers and values") {
  const auto [kept, report] = clean_tables(
      {raw_table("spam", {"name", "牛皮癣广告"}, {{"a", "b"}, {"c", "d"}}),
       raw_table("ok", {"name", "city"}, {{"a", "北京"}, {"c", "上海"}})},
      {"广告"});
  CHECK(kept.size() == 1);
  CHECK(kept[0].name == "ok");
  REQUIRE(report.rejected.size() == 1);
  CHECK(report.rejected[0] == std::pair<std::string, int>{"spam", 1});
}

TEST_CASE("cleaning keeps a healthy table and is idempotent") {
  const auto healthy = raw_table(
      "people", {"name", "city", "age"},
      {{"张三", "北京", "34"}, {"李四", "上海", "28"}, {"王五", "深圳", "45"}});
  auto [kept, report] = clean_tables({healthy}, {});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].columns[2].type == CType::Number);
  auto [again, report2] = clean_tables(kept, {});
  CHECK(again.size() == 1);
  CHECK(report2.rejected.empty());
}

TEST_CASE("cleaning is order-independent on the kept set") {
  const std::vector<DataTable> tables = {
      raw_table("a", {"x", "y"}, {{"p", "1"}, {"q", "2"}}),
      raw_table("bad", {"x"}, {{"p"}}),
      raw_table("b", {"u", "v"}, {{"m", "n"}, {"o", "w"}}),
  };
  std::vector<DataTable> reversed(tables.rbegin(), tables.rend());
  const auto [kept_a, ra] = clean_tables(tables, {});
  const auto [kept_b, rb] = clean_tables(reversed, {});
  std::vector<std::string> names_a, names_b;
  for (const auto& t : kept_a) names_a.push_back(t.name);
  for (const auto& t : kept_b) names_b.push_back(t.name);
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  CHECK(names_a == names_b);
}

TEST_CASE("sanitizer replaces matching cells by category placeholder") {
  const auto rules = default_sensitive_rules();
  const auto t = make_table("t", {{"name", CType::Text}, {"id", CType::Text}},
                            {{"张三", "110101199003077578"}, {"李四", "保密"}});
  const DataTable clean = sanitize_sensitive(t, rules);
  CHECK(clean.rows[0][1].str() == "<ID_NUMBER>");
  CHECK(clean.rows[1][1].str() == "保密");
  CHECK(clean.rows[0][0].str() == "张三");

  // independent scan oracle: replaced count equals full-match count
  std::size_t oracle_hits = 0;
  for (const auto& row : t.rows) {
    for (const auto& cell : row) {
      for (const auto& rule : rules) {
        if (std::regex_match(cell.str(), rule.pattern)) {
          ++oracle_hits;
          break;
        }
      }
    }
  }
  std::size_t replaced = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      if (clean.rows[r][c].str() != t.rows[r][c].str()) ++replaced;
    }
  }
  CHECK(replaced == oracle_hits);
}

TEST_CASE("sanitizer leaves matchless tables bit-identical") {
  const auto t = make_table("t", {{"name", CType::Text}}, {{"张三"}, {"李四"}});
  const DataTable clean = sanitize_sensitive(t, default_sensitive_rules());
  REQUIRE(clean.rows.size() == t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    CHECK(clean.rows[r][0].str() == t.rows[r][0].str());
  }
}

TEST_CASE("linking joins tables sharing a column with overlapping values") {
  const auto a = make_table("a", {{"city", CType::Text}, {"pop", CType::Number}},
                            {{"北京", "2154"}, {"上海", "2424"}});
  const auto b = make_table("b", {{"city", CType::Text}, {"gdp", CType::Number}},
                            {{"北京", "4"}, {"上海", "4.3"}});
  const auto dbs = link_tables({a, b}, 0.5);
  REQUIRE(dbs.size() == 1);
  CHECK(dbs[0].tables.size() == 2);
  REQUIRE(dbs[0].links.size() == 1);
  CHECK(dbs[0].links[0].col_a == "city");
}

TEST_CASE("linking keeps disjoint tables apart") {
  const auto a = make_table("a", {{"x", CType::Text}}, {{"p"}});
  const auto b = make_table("b", {{"y", CType::Text}}, {{"q"}});
  const auto dbs = link_tables({a, b}, 0.5);
  CHECK(dbs.size() == 2);
  CHECK(dbs[0].tables.size() == 1);
  CHECK(dbs[1].links.empty());
}

TEST_CASE("linking follows connected components: a 5-table path") {
  // chain t0-t1-t2-t3-t4 through pairwise shared columns
  std::vector<DataTable> tables;
  for (int i = 0; i < 5; ++i) {
    std::vector<std::pair<std::string, CType>> cols;
    if (i > 0) cols.emplace_back("k" + std::to_string(i - 1), CType::Text);
    cols.emplace_back("k" + std::to_string(i), CType::Text);
    std::vector<std::vector<std::string>> rows = {{},{}};
    for (auto& row : rows) {
      for (std::size_t c = 0; c < cols.size(); ++c) row.push_back("v");
    }
    tables.push_back(make_table("t" + std::to_string(i), cols, rows));
  }
  const auto dbs = link_tables(tables, 0.5);

  // union-find oracle over the same share-a-column relation
  std::vector<int> parent(5);
  for (int i = 0; i < 5; ++i) parent[i] = i;
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) {
      for (const auto& ci : tables[i].columns) {
        for (const auto& cj : tables[j].columns) {
          if (ci.name == cj.name) parent[find(j)] = find(i);
        }
      }
    }
  }
  std::set<int> roots;
  for (int i = 0; i < 5; ++i) roots.insert(find(i));
  CHECK(dbs.size() == roots.size());
  REQUIRE(dbs.size() == 1);
  CHECK(dbs[0].tables.size() == 5);
  CHECK(dbs[0].links.size() == 4);
}

TEST_CASE("database manifests keep link endpoints valid") {
  const auto a = make_table("a", {{"city", CType::Text}, {"pop", CType::Number}},
                            {{"北京", "2154"}, {"上海", "2424"}});
  const auto dbs = link_tables({a}, 0.5);
  REQUIRE(dbs.size() == 1);
  for (const auto& link : dbs[0].links) {
    CHECK(dbs[0].find_table(link.table_a) != nullptr);
    CHECK(dbs[0].find_table(link.table_b) != nullptr);
  }
}

TEST_SUITE_END();
