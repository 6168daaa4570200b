#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cfqkd/config.hpp"
#include "cfqkd/types.hpp"

namespace cfqkd {

struct OptimizationResult {
  AttackScenario scenario = AttackScenario::CombinedNoDisc;
  AttackParams params;  // coarse-grid optimum
  RatioReport report;   // ratio_report(attack_stats(cfg, scenario, params), baseline_stats(cfg))
  double grid_step = 0.0;
  std::size_t evaluations = 0;
  // Best point of the grid_step/10 rescan around the coarse optimum.
  AttackParams refined_params;
  RatioReport refined_report;
};

struct OptimizerOptions {
  double grid_step = 0.001;
  bool refine = true;
  unsigned workers = 0;  // 0: hardware concurrency
};

/// The points {0, step, 2 step, ..., 1} with 1 always included.
std::vector<double> unit_grid(double step);

/// Exhaustive minimax search over x (and z for CombinedNoDisc) with y and
/// z0 solved exactly per x. Minimises the largest |ratio - 1|; ties go to
/// the smaller x, then the smaller z. The result does not depend on the
/// number of workers.
OptimizationResult optimize(const ProtocolConfig& cfg, AttackScenario scenario,
                            const OptimizerOptions& options = {});

/// Attack parameters for a grid point: y and z0 filled in exactly.
AttackParams complete_params(const ProtocolConfig& cfg, AttackScenario scenario, double x, double z);

enum class ReferenceTable { TableI, TableII };

struct TableColumn {
  std::string label;
  RawConfig config;  // discrimination is overwritten per sub-table
};

struct TableCell {
  Discrimination discrimination = Discrimination::None;
  std::size_t column = 0;
  std::string column_label;
  OptimizationResult result;
};

/// Column configurations of the two attack-efficiency tables.
std::vector<TableColumn> table_columns(ReferenceTable table);

/// Sub-table order: no discrimination, all, D1/D2 only, D0/D2 only.
inline constexpr Discrimination kTableOrder[] = {Discrimination::None, Discrimination::All, Discrimination::D1D2,
                                                 Discrimination::D0D2};

/// Optimises every cell; results are ordered by sub-table, then column.
std::vector<TableCell> reproduce_tables(ReferenceTable table, const OptimizerOptions& options = {});

}  // namespace cfqkd
