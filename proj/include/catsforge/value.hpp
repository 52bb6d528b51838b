#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace catsforge {

enum class CType { Text, Number, Time, Bool };

const char* ctype_name(CType t);
std::optional<CType> ctype_from_name(std::string_view name);

struct TimePoint {
  int year = 0;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;

  auto operator<=>(const TimePoint&) const = default;
};

// Lexical parsers. They accept the surface forms seen in ingested tables;
// failure means the cell does not look like that type at all.
std::optional<double> parse_number(std::string_view s);  // commas, percent, sign
std::optional<bool> parse_bool(std::string_view s);
std::optional<TimePoint> parse_time(std::string_view s);

// Canonical decimal rendering: integral values print without a decimal
// point, fractional values with trailing zeros trimmed.
std::string canonical_number(double v);
// Rounds half away from zero to max_decimals first, then canonicalizes.
std::string canonical_number(double v, int max_decimals);

// A typed cell. Nulls keep the original display string so that unparsable
// cells survive serialization untouched.
class Value {
 public:
  Value() = default;

  static Value null(std::string display = "");
  static Value text(std::string s);
  static Value number(double v);
  static Value number(double v, std::string display);
  static Value boolean(bool b, std::string display);
  static Value time(TimePoint t, std::string display);

  bool is_null() const { return null_; }
  CType type() const { return type_; }
  double num() const { return num_; }
  bool truth() const { return bool_; }
  const TimePoint& when() const { return time_; }
  const std::string& str() const { return display_; }

  // String key under which set operations and GROUP BY treat cells as
  // equal (nulls are equal to each other; 2 and 2.0 collapse).
  std::string group_key() const;

  bool operator==(const Value& other) const { return group_key() == other.group_key(); }

 private:
  bool null_ = true;
  CType type_ = CType::Text;
  double num_ = 0.0;
  bool bool_ = false;
  TimePoint time_;
  std::string display_;
};

// Three-valued comparison used by WHERE and ORDER BY: nullopt when a null
// is involved or the operands cannot be coerced to a common type. Text
// operands coerce toward the typed side (number/time/bool) when they parse.
std::optional<int> compare_values(const Value& a, const Value& b);

// Parses a raw cell under a column type; unparsable or empty cells become
// nulls that keep the raw display string.
Value parse_cell(std::string_view raw, CType type);

}  // namespace catsforge
