#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "gridmul/grid_code.hpp"

namespace gridmul {

struct DetectorConfig {
  /// Multiplier applied to the threshold of weighted residuals. 1.0 applies
  /// one threshold to plain and weighted residuals alike; raise it when
  /// bounded analog noise is enabled and weighted sums amplify it.
  double weighted_delta_scale = 1.0;
};

/// Residuals of every structural constraint against the stored parities,
/// plus the flagged line sets. A residual is always "recomputed sum minus
/// stored parity". Lines are flagged by strict comparison against delta.
struct Syndrome {
  std::vector<double> row_plain;     // length n
  std::vector<double> row_weighted;  // length n
  std::vector<double> col_plain;     // length m
  std::vector<double> col_weighted;  // length m

  /// Global residuals indexed [p][q] for p, q in {plain, weighted}:
  /// recomputed weighted data-block sum minus the stored corner entry.
  std::array<std::array<double, 2>, 2> global{};

  std::vector<std::size_t> flagged_rows;  // ordered, 0-based
  std::vector<std::size_t> flagged_cols;  // ordered, 0-based

  double delta = 0.0;
  double weighted_delta_scale = 1.0;

  bool globals_within(double tol) const;
};

Syndrome compute_syndrome(const GridCodedProduct& product, const GridCodeSpec& spec, double delta,
                          const DetectorConfig& config = {});

enum class PatternClass {
  Clean,          // nothing flagged, global residuals within delta
  ParityRegion,   // nothing flagged but a global residual trips (corner damage)
  Correctable,    // both sides flagged, min(flagged rows, flagged cols) <= 2
  Uncorrectable,  // both sides flagged, min >= 3; recomputation required
  Inconsistent,   // exactly one side flagged (parity symbols or an input-side line)
};

PatternClass classify_pattern(const Syndrome& syndrome);

/// Line-oriented debug dump:
///   ROW i plain=<v> weighted=<v> flagged=<0|1>
///   COL j plain=<v> weighted=<v> flagged=<0|1>
void dump_syndrome(const Syndrome& syndrome, std::ostream& out);

}  // namespace gridmul
