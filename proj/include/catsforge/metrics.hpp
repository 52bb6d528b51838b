#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "catsforge/dataset.hpp"
#include "catsforge/sql_exec.hpp"

namespace catsforge {

struct CoverageScore {
  std::size_t covered = 0;  // cells whose string appears in the text
  std::size_t total = 0;    // header cells + body cells

  double ratio() const {
    return total == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(total);
  }
};

// A cell counts as covered iff its string (or, for numeric cells, its
// canonical decimal rendering) is a substring of the text after stripping
// every whitespace character from both sides. Headers join both the
// numerator candidates and the denominator. Pure string matching, no
// semantic matching.
CoverageScore coverage(std::string_view text, const ResultTable& rt);

// Surplus body-cell occurrences: sum over body cells of
// max(0, occurrences(cell string) - 1), non-overlapping counting.
std::size_t repetition(std::string_view text, const ResultTable& rt);

struct ComplexityStats {
  // buckets: {1, 2, 3, >=4} for columns/rows; hardness levels in order;
  // {<20, <40, <60, >=60} non-whitespace characters for target length
  std::array<std::size_t, 4> columns{};
  std::array<std::size_t, 4> rows{};
  std::array<std::size_t, 4> hardness{};
  std::array<std::size_t, 4> target_length{};
  std::size_t examples = 0;
  std::size_t parse_failures = 0;  // excluded from the hardness buckets
};

// Hardness re-derives from the sql text via parse + classify; rows and
// columns come from the stored table; target length counts non-whitespace
// characters of the reference (missing references count as length 0).
ComplexityStats dataset_stats(const std::vector<Example>& examples);

// Mean of per-example coverage ratios, as a percentage.
double corpus_coverage_percent(const std::vector<CoverageScore>& scores);

}  // namespace catsforge
