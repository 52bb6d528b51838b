#include "catsforge/metrics.hpp"

#include "catsforge/sql_parser.hpp"
#include "catsforge/strings.hpp"

namespace catsforge {

namespace {

bool cell_covered(const std::string& normalized_text, const Value& cell) {
  const std::string primary = remove_whitespace(cell.str());
  if (primary.empty()) return true;  // vacuous match
  if (contains(normalized_text, primary)) return true;
  // numeric cells also match their canonical decimal rendering
  if (const auto n = parse_number(cell.str())) {
    const std::string canonical = canonical_number(*n);
    if (canonical != primary && contains(normalized_text, canonical)) return true;
  }
  return false;
}

}  // namespace

CoverageScore coverage(std::string_view text, const ResultTable& rt) {
  const std::string normalized = remove_whitespace(text);
  CoverageScore score;
  for (const auto& header : rt.headers) {
    ++score.total;
    if (cell_covered(normalized, Value::text(header))) ++score.covered;
  }
  for (const auto& row : rt.rows) {
    for (const auto& cell : row) {
      ++score.total;
      if (cell_covered(normalized, cell)) ++score.covered;
    }
  }
  return score;
}

std::size_t repetition(std::string_view text, const ResultTable& rt) {
  const std::string normalized = remove_whitespace(text);
  std::size_t surplus = 0;
  for (const auto& row : rt.rows) {
    for (const auto& cell : row) {
      const std::string needle = remove_whitespace(cell.str());
      if (needle.empty()) continue;
      const std::size_t n = count_occurrences(normalized, needle);
      if (n > 1) surplus += n - 1;
    }
  }
  return surplus;
}

ComplexityStats dataset_stats(const std::vector<Example>& examples) {
  ComplexityStats stats;
  const auto bucket4 = [](std::size_t n) { return n >= 4 ? 3 : (n == 0 ? 0 : n - 1); };
  for (const auto& ex : examples) {
    ++stats.examples;
    ++stats.columns[bucket4(ex.table.headers.size())];
    ++stats.rows[bucket4(ex.table.rows.size())];
    try {
      const SqlAst ast = parse_sql(ex.sql);
      ++stats.hardness[static_cast<std::size_t>(classify_hardness(ast))];
    } catch (const std::exception&) {
      ++stats.parse_failures;
    }
    const std::size_t len =
        ex.reference ? count_non_whitespace_chars(*ex.reference) : 0;
    if (len < 20) {
      ++stats.target_length[0];
    } else if (len < 40) {
      ++stats.target_length[1];
    } else if (len < 60) {
      ++stats.target_length[2];
    } else {
      ++stats.target_length[3];
    }
  }
  return stats;
}

double corpus_coverage_percent(const std::vector<CoverageScore>& scores) {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : scores) sum += s.ratio();
  return 100.0 * sum / static_cast<double>(scores.size());
}

}  // namespace catsforge
