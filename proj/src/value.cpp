#include "catsforge/value.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "catsforge/strings.hpp"

namespace catsforge {

const char* ctype_name(CType t) {
  switch (t) {
    case CType::Text: return "Text";
    case CType::Number: return "Number";
    case CType::Time: return "Time";
    case CType::Bool: return "Bool";
  }
  return "Text";
}

std::optional<CType> ctype_from_name(std::string_view name) {
  const std::string lower = to_lower_ascii(name);
  if (lower == "text") return CType::Text;
  if (lower == "number") return CType::Number;
  if (lower == "time") return CType::Time;
  if (lower == "bool") return CType::Bool;
  return std::nullopt;
}

std::optional<double> parse_number(std::string_view s) {
  const std::string t = strip(s);
  if (t.empty()) return std::nullopt;
  std::size_t i = 0;
  bool percent = false;
  std::string digits;
  digits.reserve(t.size());
  if (t[i] == '+' || t[i] == '-') digits.push_back(t[i++]);
  bool seen_digit = false;
  bool seen_dot = false;
  int group = -1;  // digits since last comma, -1 before any comma
  for (; i < t.size(); ++i) {
    const char c = t[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (group >= 0) ++group;
    } else if (c == ',') {
      // comma grouping: exactly three digits between commas
      if (!seen_digit || seen_dot) return std::nullopt;
      if (group >= 0 && group != 3) return std::nullopt;
      group = 0;
    } else if (c == '.') {
      if (seen_dot) return std::nullopt;
      if (group >= 0 && group != 3) return std::nullopt;
      group = -1;
      seen_dot = true;
      digits.push_back(c);
    } else if (c == '%') {
      percent = true;
      ++i;
      break;
    } else {
      return std::nullopt;
    }
  }
  if (i != t.size() || !seen_digit) return std::nullopt;
  if (group >= 0 && group != 3) return std::nullopt;
  const double v = std::strtod(digits.c_str(), nullptr);
  (void)percent;  // "45%" keeps magnitude 45; the display string keeps the sign
  return v;
}

std::optional<bool> parse_bool(std::string_view s) {
  const std::string t = to_lower_ascii(strip(s));
  if (t == "true" || t == "yes" || t == "y" || t == "是" || t == "真" || t == "对")
    return true;
  if (t == "false" || t == "no" || t == "n" || t == "否" || t == "假" || t == "错")
    return false;
  return std::nullopt;
}

namespace {

bool take_int(std::string_view s, std::size_t& i, int max_digits, int& out) {
  int digits = 0;
  long long v = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9' && digits < max_digits) {
    v = v * 10 + (s[i] - '0');
    ++i;
    ++digits;
  }
  if (digits == 0) return false;
  out = static_cast<int>(v);
  return true;
}

bool take_sep(std::string_view s, std::size_t& i, std::string_view ascii,
              std::string_view cjk) {
  if (i < s.size() && ascii.find(s[i]) != std::string_view::npos) {
    ++i;
    return true;
  }
  if (!cjk.empty() && s.substr(i, cjk.size()) == cjk) {
    i += cjk.size();
    return true;
  }
  return false;
}

bool valid_date(int y, int m, int d) {
  return y >= 1 && y <= 9999 && m >= 1 && m <= 12 && d >= 1 && d <= 31;
}

}  // namespace

std::optional<TimePoint> parse_time(std::string_view raw) {
  const std::string t = strip(raw);
  std::string_view s = t;
  if (s.empty()) return std::nullopt;
  TimePoint tp;
  std::size_t i = 0;
  if (!take_int(s, i, 4, tp.year) || tp.year < 100) return std::nullopt;
  // year-only form needs the CJK marker, otherwise it is just a number
  if (take_sep(s, i, "", "年")) {
    if (i == s.size()) return TimePoint{tp.year, 1, 1};
    if (!take_int(s, i, 2, tp.month)) return std::nullopt;
    if (!take_sep(s, i, "", "月")) return std::nullopt;
    if (i == s.size()) return valid_date(tp.year, tp.month, 1)
                                  ? std::optional<TimePoint>(TimePoint{tp.year, tp.month, 1})
                                  : std::nullopt;
    if (!take_int(s, i, 2, tp.day)) return std::nullopt;
    take_sep(s, i, "", "日");
  } else if (take_sep(s, i, "-/.", "")) {
    const char sep = s[i - 1];
    if (!take_int(s, i, 2, tp.month)) return std::nullopt;
    if (i < s.size()) {
      if (s[i] != sep) return std::nullopt;
      ++i;
      if (!take_int(s, i, 2, tp.day)) return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  if (!valid_date(tp.year, tp.month, tp.day)) return std::nullopt;
  if (i == s.size()) return tp;
  // optional time-of-day
  if (s[i] != ' ' && s[i] != 'T') return std::nullopt;
  ++i;
  if (!take_int(s, i, 2, tp.hour)) return std::nullopt;
  if (!take_sep(s, i, ":", "时")) return std::nullopt;
  if (!take_int(s, i, 2, tp.minute)) return std::nullopt;
  if (i < s.size()) {
    if (!take_sep(s, i, ":", "分")) return std::nullopt;
    if (!take_int(s, i, 2, tp.second)) return std::nullopt;
    take_sep(s, i, "", "秒");
  }
  if (i != s.size()) return std::nullopt;
  if (tp.hour > 23 || tp.minute > 59 || tp.second > 60) return std::nullopt;
  return tp;
}

std::string canonical_number(double v) {
  if (std::isnan(v) || std::isinf(v)) return "NaN";
  const double r = std::round(v);
  if (std::fabs(v - r) < 1e-9 && std::fabs(v) < 1e15) {
    if (r == 0.0) return "0";  // fold -0
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", r);
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string canonical_number(double v, int max_decimals) {
  double scale = 1.0;
  for (int i = 0; i < max_decimals; ++i) scale *= 10.0;
  const double rounded = std::round(v * scale) / scale;
  return canonical_number(rounded);
}

Value Value::null(std::string display) {
  Value v;
  v.null_ = true;
  v.display_ = std::move(display);
  return v;
}

Value Value::text(std::string s) {
  Value v;
  v.null_ = false;
  v.type_ = CType::Text;
  v.display_ = std::move(s);
  return v;
}

Value Value::number(double d) { return number(d, canonical_number(d)); }

Value Value::number(double d, std::string display) {
  Value v;
  v.null_ = false;
  v.type_ = CType::Number;
  v.num_ = d;
  v.display_ = std::move(display);
  return v;
}

Value Value::boolean(bool b, std::string display) {
  Value v;
  v.null_ = false;
  v.type_ = CType::Bool;
  v.bool_ = b;
  v.display_ = std::move(display);
  return v;
}

Value Value::time(TimePoint t, std::string display) {
  Value v;
  v.null_ = false;
  v.type_ = CType::Time;
  v.time_ = t;
  v.display_ = std::move(display);
  return v;
}

std::string Value::group_key() const {
  if (null_) return "\x01null";
  switch (type_) {
    case CType::Text: return "t:" + display_;
    case CType::Number: return "n:" + canonical_number(num_);
    case CType::Bool: return bool_ ? "b:1" : "b:0";
    case CType::Time: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "d:%04d-%02d-%02d %02d:%02d:%02d",
                    time_.year, time_.month, time_.day, time_.hour,
                    time_.minute, time_.second);
      return buf;
    }
  }
  return display_;
}

namespace {

std::optional<Value> coerce_to(const Value& v, CType target) {
  if (v.type() == target) return v;
  if (v.type() != CType::Text) return std::nullopt;
  switch (target) {
    case CType::Number:
      if (auto n = parse_number(v.str())) return Value::number(*n, v.str());
      return std::nullopt;
    case CType::Time:
      if (auto t = parse_time(v.str())) return Value::time(*t, v.str());
      return std::nullopt;
    case CType::Bool:
      if (auto b = parse_bool(v.str())) return Value::boolean(*b, v.str());
      return std::nullopt;
    case CType::Text: return v;
  }
  return std::nullopt;
}

int cmp(double a, double b) { return a < b ? -1 : (a > b ? 1 : 0); }

}  // namespace

std::optional<int> compare_values(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return std::nullopt;
  CType target = a.type();
  if (a.type() == CType::Text && b.type() != CType::Text) target = b.type();
  const auto ca = coerce_to(a, target);
  const auto cb = coerce_to(b, target);
  if (!ca || !cb) return std::nullopt;
  switch (target) {
    case CType::Number: return cmp(ca->num(), cb->num());
    case CType::Bool: return cmp(ca->truth() ? 1 : 0, cb->truth() ? 1 : 0);
    case CType::Time: {
      const auto c = ca->when() <=> cb->when();
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case CType::Text: {
      const int c = ca->str().compare(cb->str());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
  }
  return std::nullopt;
}

Value parse_cell(std::string_view raw, CType type) {
  const std::string t = strip(raw);
  if (t.empty()) return Value::null();
  switch (type) {
    case CType::Text: return Value::text(t);
    case CType::Number: {
      if (auto n = parse_number(t)) {
        // plain decimal forms normalize ("4.50" -> "4.5"); grouped or
        // percent forms keep their surface string
        bool plain = true;
        for (char c : t) {
          if (!((c >= '0' && c <= '9') || c == '.' || c == '+' || c == '-'))
            plain = false;
        }
        return Value::number(*n, plain ? canonical_number(*n) : t);
      }
      return Value::null(t);
    }
    case CType::Time: {
      if (auto tp = parse_time(t)) return Value::time(*tp, t);
      return Value::null(t);
    }
    case CType::Bool: {
      if (auto b = parse_bool(t)) return Value::boolean(*b, t);
      return Value::null(t);
    }
  }
  return Value::null(t);
}

}  // namespace catsforge
