#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridmul/grid_code.hpp"
#include "gridmul/syndrome.hpp"

namespace gridmul {

struct RepairEntry {
  std::size_t row = 0;  // full-matrix coordinates
  std::size_t col = 0;
  double old_value = 0.0;
  double new_value = 0.0;
  double estimated_error = 0.0;
};

enum class OutcomeKind { Clean, Corrected, ParityRepair, Uncorrectable };

/// Result of a correction attempt. The input product is never mutated;
/// `corrected` holds the repaired copy for Corrected and ParityRepair. For
/// every Corrected outcome the repaired product re-checks clean at the same
/// delta (a repair that leaves any residual flagged is downgraded to
/// Uncorrectable instead of being reported as success).
struct CorrectionOutcome {
  OutcomeKind kind = OutcomeKind::Clean;
  std::optional<GridCodedProduct> corrected;
  std::vector<RepairEntry> repairs;
  std::string reason;
};

/// Repairs the product according to the syndrome classification:
///  - flagged data lines with min(rows, cols) <= 2 are solved from the
///    parity residuals (single-line subtraction or closed-form 2x2 solves);
///  - one-sided flag sets with a consistent integer weighted/plain residual
///    ratio identify a corrupted input-side line, which is repaired across
///    its full extent from the opposite side's residuals;
///  - one-sided flag sets without that structure are treated as damaged
///    parity symbols and recomputed from the data block;
///  - min(rows, cols) >= 3 is refused.
CorrectionOutcome correct(const GridCodedProduct& product, const Syndrome& syndrome,
                          const GridCodeSpec& spec);

/// Subtracts the column-plain residual of every column in `cols` from the
/// corresponding entry of row `row`. Valid when all flagged errors lie in
/// one row.
std::vector<RepairEntry> repair_single_row(GridCodedProduct& product, std::size_t row,
                                           const std::vector<std::size_t>& cols,
                                           const Syndrome& syndrome);

/// Per column in `cols`, solves
///   [ 1     1   ] [e0]   [ col_plain residual    ]
///   [w(r0) w(r1)] [e1] = [ col_weighted residual ]
/// in closed form (w = 1-based row weight, determinant w(r1) - w(r0)) and
/// subtracts the two error estimates.
std::vector<RepairEntry> repair_two_rows(GridCodedProduct& product, std::size_t row0,
                                         std::size_t row1, const std::vector<std::size_t>& cols,
                                         const Syndrome& syndrome);

/// Column-side counterparts.
std::vector<RepairEntry> repair_single_col(GridCodedProduct& product, std::size_t col,
                                           const std::vector<std::size_t>& rows,
                                           const Syndrome& syndrome);
std::vector<RepairEntry> repair_two_cols(GridCodedProduct& product, std::size_t col0,
                                         std::size_t col1, const std::vector<std::size_t>& rows,
                                         const Syndrome& syndrome);

/// Recomputes the parity symbols implicated by a one-sided syndrome (and any
/// tripped corner) from the data block.
std::vector<RepairEntry> repair_parity(GridCodedProduct& product, const Syndrome& syndrome,
                                       const GridCodeSpec& spec);

/// CSV repair log: header "row,col,old,new,e_hat" then one line per repair.
void write_repair_log_csv(const std::vector<RepairEntry>& repairs, std::ostream& out);

}  // namespace gridmul
