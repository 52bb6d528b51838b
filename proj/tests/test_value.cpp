#include "doctest.h"

#include "catsforge/value.hpp"

using namespace catsforge;

TEST_SUITE_BEGIN("value");

TEST_CASE("number parsing accepts plain, grouped and percent forms") {
  CHECK(parse_number("42") == 42.0);
  CHECK(parse_number("-3.5") == -3.5);
  CHECK(parse_number("1,234") == 1234.0);
  CHECK(parse_number("12,345,678") == 12345678.0);
  CHECK(parse_number("45%") == 45.0);
  CHECK_FALSE(parse_number("1,23").has_value());
  CHECK_FALSE(parse_number("abc").has_value());
  CHECK_FALSE(parse_number("").has_value());
  CHECK_FALSE(parse_number("2021-05-01").has_value());
}

TEST_CASE("bool parsing") {
  CHECK(parse_bool("yes") == true);
  CHECK(parse_bool("No") == false);
  CHECK(parse_bool("是") == true);
  CHECK(parse_bool("否") == false);
  CHECK_FALSE(parse_bool("1").has_value());  // numeric stays numeric
  CHECK_FALSE(parse_bool("maybe").has_value());
}

TEST_CASE("time parsing") {
  auto t = parse_time("2021-05-01");
  REQUIRE(t.has_value());
  CHECK(t->year == 2021);
  CHECK(t->month == 5);
  CHECK(t->day == 1);
  CHECK(parse_time("2021/5/1").has_value());
  CHECK(parse_time("2021年5月1日").has_value());
  CHECK(parse_time("2021年5月").has_value());
  CHECK(parse_time("2021-05-01 12:30:00").has_value());
  CHECK_FALSE(parse_time("2021").has_value());
  CHECK_FALSE(parse_time("2021-13-01").has_value());
  CHECK_FALSE(parse_time("word").has_value());
}

TEST_CASE("canonical number rendering trims trailing zeros") {
  CHECK(canonical_number(5.0) == "5");
  CHECK(canonical_number(4.5) == "4.5");
  CHECK(canonical_number(-2.0) == "-2");
  CHECK(canonical_number(0.125) == "0.125");
  CHECK(canonical_number(4.5, 2) == "4.5");
  CHECK(canonical_number(4.333333, 2) == "4.33");
  CHECK(canonical_number(4.0, 2) == "4");
  CHECK(canonical_number(1.0 / 3.0, 2) == "0.33");
}

TEST_CASE("parse_cell normalizes plain decimals but keeps surface forms") {
  const Value plain = parse_cell("4.50", CType::Number);
  CHECK(plain.str() == "4.5");
  const Value grouped = parse_cell("1,234", CType::Number);
  CHECK(grouped.str() == "1,234");
  CHECK(grouped.num() == 1234.0);
  const Value failed = parse_cell("n/a", CType::Number);
  CHECK(failed.is_null());
  CHECK(failed.str() == "n/a");  // display survives for serialization
  CHECK(parse_cell("  ", CType::Text).is_null());
}

TEST_CASE("comparison coerces text toward the typed operand") {
  CHECK(compare_values(Value::number(5), Value::number(7)) == -1);
  CHECK(compare_values(Value::number(5), Value::text("5")) == 0);
  CHECK(compare_values(Value::text("2021-05-01"),
                       Value::time(TimePoint{2021, 5, 2}, "2021-05-02")) == -1);
  CHECK_FALSE(compare_values(Value::null(), Value::number(1)).has_value());
  CHECK_FALSE(compare_values(Value::text("abc"), Value::number(1)).has_value());
  CHECK(compare_values(Value::text("b"), Value::text("a")) == 1);
}

TEST_CASE("group keys collapse numeric aliases and distinguish types") {
  CHECK(Value::number(2.0).group_key() == Value::number(2).group_key());
  CHECK(Value::number(2).group_key() != Value::text("2").group_key());
  CHECK(Value::null().group_key() == Value::null("x").group_key());
}

TEST_SUITE_END();
