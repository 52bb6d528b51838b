#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "catsforge/rng.hpp"
#include "catsforge/sql_ast.hpp"
#include "catsforge/sql_exec.hpp"

namespace catsforge {

// Knobs for the weighted top-down grammar expansion. rule_weights keys
// (all optional, see default_profile() in sql_synth.cpp):
//   setop, multi_table, select_1..select_4, agg, mathop, where,
//   conds_1..conds_3, or, like, in_list, nested, group_by, group_by_2,
//   order_by, limit
// max_depth counts SELECT nesting levels: 1 permits only the bare
// "SELECT col FROM tbl" production, 2 adds one level of subqueries.
struct GenConfig {
  std::uint64_t seed = 0;
  int max_depth = 2;
  std::map<std::string, double> rule_weights;
  std::map<Hardness, double> hardness_targets;  // must sum to 1 when used
  int max_attempts_per_example = 400;
};

struct RawExample {
  SqlAst sql;
  ResultTable table;
  std::string db_name;
  Hardness hardness = Hardness::Easy;
};

class GenFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One schema-valid query grounded in db: column and table slots come from
// the schema, literals from observed column values. Does not filter empty
// executions; that is sample_dataset's job.
SqlAst generate_sql(const Database& db, const GenConfig& cfg, Rng& rng);

// n examples whose executed tables are non-empty and whose hardness mix
// matches cfg.hardness_targets to within rounding. Deterministic for a
// fixed (dbs, cfg): every database owns the substream Rng(mix(seed, i)).
std::vector<RawExample> sample_dataset(const std::vector<Database>& dbs,
                                       const GenConfig& cfg, std::size_t n);

}  // namespace catsforge
