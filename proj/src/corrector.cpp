#include "gridmul/corrector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gridmul {

namespace {

// Residual ratios are rounded to line indices; genuine line corruptions land
// within numerical noise of an integer, so the acceptance band can be wide.
constexpr double kRatioTol = 0.25;

void apply_repair(GridCodedProduct& product, std::size_t row, std::size_t col,
                  double estimated_error, std::vector<RepairEntry>& repairs) {
  const double old_value = product.at(row, col);
  const double new_value = old_value - estimated_error;
  product.set(row, col, new_value);
  repairs.push_back({row, col, old_value, new_value, estimated_error});
}

void set_logged(GridCodedProduct& product, std::size_t row, std::size_t col, double new_value,
                std::vector<RepairEntry>& repairs) {
  const double old_value = product.at(row, col);
  product.set(row, col, new_value);
  repairs.push_back({row, col, old_value, new_value, old_value - new_value});
}

// Rebuilds both parity entries of one data row from the data block, using
// the same ascending summation as the detector.
void recompute_row_parities(GridCodedProduct& product, const GridCodeSpec& spec, std::size_t row,
                            std::vector<RepairEntry>& repairs) {
  const std::size_t m = spec.dims.m;
  double plain = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    plain += product.at(row, j);
    weighted += spec.col_check_weighted[j] * product.at(row, j);
  }
  set_logged(product, row, m, plain, repairs);
  set_logged(product, row, m + 1, weighted, repairs);
}

void recompute_col_parities(GridCodedProduct& product, const GridCodeSpec& spec, std::size_t col,
                            std::vector<RepairEntry>& repairs) {
  const std::size_t n = spec.dims.n;
  double plain = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    plain += product.at(i, col);
    weighted += spec.row_check_weighted[i] * product.at(i, col);
  }
  set_logged(product, n, col, plain, repairs);
  set_logged(product, n + 1, col, weighted, repairs);
}

void recompute_corner(GridCodedProduct& product, const GridCodeSpec& spec, std::size_t p,
                      std::size_t q, std::vector<RepairEntry>& repairs) {
  const std::size_t n = spec.dims.n;
  const std::size_t m = spec.dims.m;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double alpha = p == 0 ? 1.0 : spec.row_check_weighted[i];
    double row_dot = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double beta = q == 0 ? 1.0 : spec.col_check_weighted[j];
      row_dot += beta * product.at(i, j);
    }
    total += alpha * row_dot;
  }
  set_logged(product, n + p, m + q, total, repairs);
}

Syndrome resync(const GridCodedProduct& product, const GridCodeSpec& spec,
                const Syndrome& reference) {
  DetectorConfig config;
  config.weighted_delta_scale = reference.weighted_delta_scale;
  return compute_syndrome(product, spec, reference.delta, config);
}

bool syndrome_clean(const Syndrome& syndrome) {
  return syndrome.flagged_rows.empty() && syndrome.flagged_cols.empty() &&
         syndrome.globals_within(syndrome.delta);
}

CorrectionOutcome post_check_failed() {
  CorrectionOutcome outcome;
  outcome.kind = OutcomeKind::Uncorrectable;
  outcome.reason = "post-check failed";
  return outcome;
}

// Plain residuals below this cannot support a reliable weighted/plain ratio.
// A line flagged by a genuine single-line corruption always clears it: being
// flagged at all requires plain > delta or weighted > delta, and the ratio
// is bounded by `limit`.
double plain_guard(double delta, std::size_t limit) {
  return std::max(delta / (4.0 * static_cast<double>(limit)), 1e-300);
}

struct LineEstimate {
  bool ok = false;
  std::size_t line = 0;  // 0-based
};

bool ratios_match_target(const std::vector<double>& plain, const std::vector<double>& weighted,
                         const std::vector<std::size_t>& flagged, double delta, std::size_t limit,
                         long long target) {
  if (target < 1 || target > static_cast<long long>(limit)) return false;
  const double guard = plain_guard(delta, limit);
  for (std::size_t idx : flagged) {
    if (std::abs(plain[idx]) < guard) return false;
    if (std::abs(weighted[idx] / plain[idx] - static_cast<double>(target)) > kRatioTol)
      return false;
  }
  return true;
}

// When one corrupted line on the opposite side explains every flagged line,
// all weighted/plain residual ratios agree on that line's 1-based weight.
LineEstimate common_line_from_ratios(const std::vector<double>& plain,
                                     const std::vector<double>& weighted,
                                     const std::vector<std::size_t>& flagged, double delta,
                                     std::size_t limit) {
  if (flagged.empty()) return {};
  const double guard = plain_guard(delta, limit);
  std::vector<double> ratios;
  ratios.reserve(flagged.size());
  for (std::size_t idx : flagged) {
    if (std::abs(plain[idx]) < guard) return {};
    ratios.push_back(weighted[idx] / plain[idx]);
  }
  const std::size_t mid = ratios.size() / 2;
  std::nth_element(ratios.begin(), ratios.begin() + mid, ratios.end());
  const long long target = std::llround(ratios[mid]);
  if (!ratios_match_target(plain, weighted, flagged, delta, limit, target)) return {};
  return {true, static_cast<std::size_t>(target - 1)};
}

// Repairs one corrupted data row across its full extent: every column's
// plain residual is that column's share of the corruption, including the
// sub-threshold columns that were never flagged. The row's own parity
// entries absorbed the corruption consistently and are rebuilt afterwards.
std::vector<RepairEntry> repair_full_row(GridCodedProduct& product, const GridCodeSpec& spec,
                                         std::size_t row, const Syndrome& syndrome) {
  std::vector<RepairEntry> repairs;
  for (std::size_t j = 0; j < spec.dims.m; ++j) {
    apply_repair(product, row, j, syndrome.col_plain[j], repairs);
  }
  recompute_row_parities(product, spec, row, repairs);
  return repairs;
}

std::vector<RepairEntry> repair_full_col(GridCodedProduct& product, const GridCodeSpec& spec,
                                         std::size_t col, const Syndrome& syndrome) {
  std::vector<RepairEntry> repairs;
  for (std::size_t i = 0; i < spec.dims.n; ++i) {
    apply_repair(product, i, col, syndrome.row_plain[i], repairs);
  }
  recompute_col_parities(product, spec, col, repairs);
  return repairs;
}

CorrectionOutcome corrected_outcome(GridCodedProduct product, std::vector<RepairEntry> repairs,
                                    OutcomeKind kind) {
  CorrectionOutcome outcome;
  outcome.kind = kind;
  outcome.corrected = std::move(product);
  outcome.repairs = std::move(repairs);
  return outcome;
}

// Flagged rows each holding one substantial error are localized from their
// own residual pair: the weighted/plain ratio is the 1-based column index.
// Any leftover one-sided column flags are then attributed to a corrupted
// left-input line.
CorrectionOutcome compound_row_side(const GridCodedProduct& product, const Syndrome& syndrome,
                                    const GridCodeSpec& spec) {
  const std::size_t m = spec.dims.m;
  GridCodedProduct copy = product;
  std::vector<RepairEntry> repairs;
  const double guard = plain_guard(syndrome.delta, m);
  for (std::size_t r : syndrome.flagged_rows) {
    const double rp = syndrome.row_plain[r];
    const double rw = syndrome.row_weighted[r];
    if (std::abs(rp) < guard) return post_check_failed();
    const double ratio = rw / rp;
    const long long target = std::llround(ratio);
    if (target < 1 || target > static_cast<long long>(m) ||
        std::abs(ratio - static_cast<double>(target)) > kRatioTol) {
      return post_check_failed();
    }
    apply_repair(copy, r, static_cast<std::size_t>(target - 1), rp, repairs);
  }
  Syndrome after = resync(copy, spec, syndrome);
  if (syndrome_clean(after)) return corrected_outcome(std::move(copy), std::move(repairs),
                                                      OutcomeKind::Corrected);
  if (after.flagged_rows.empty() && !after.flagged_cols.empty()) {
    const LineEstimate row = common_line_from_ratios(after.col_plain, after.col_weighted,
                                                     after.flagged_cols, after.delta, spec.dims.n);
    if (row.ok) {
      auto more = repair_full_row(copy, spec, row.line, after);
      repairs.insert(repairs.end(), more.begin(), more.end());
      if (syndrome_clean(resync(copy, spec, syndrome))) {
        return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::Corrected);
      }
    }
  }
  return post_check_failed();
}

CorrectionOutcome compound_col_side(const GridCodedProduct& product, const Syndrome& syndrome,
                                    const GridCodeSpec& spec) {
  const std::size_t n = spec.dims.n;
  GridCodedProduct copy = product;
  std::vector<RepairEntry> repairs;
  const double guard = plain_guard(syndrome.delta, n);
  for (std::size_t c : syndrome.flagged_cols) {
    const double cp = syndrome.col_plain[c];
    const double cw = syndrome.col_weighted[c];
    if (std::abs(cp) < guard) return post_check_failed();
    const double ratio = cw / cp;
    const long long target = std::llround(ratio);
    if (target < 1 || target > static_cast<long long>(n) ||
        std::abs(ratio - static_cast<double>(target)) > kRatioTol) {
      return post_check_failed();
    }
    apply_repair(copy, static_cast<std::size_t>(target - 1), c, cp, repairs);
  }
  Syndrome after = resync(copy, spec, syndrome);
  if (syndrome_clean(after)) return corrected_outcome(std::move(copy), std::move(repairs),
                                                      OutcomeKind::Corrected);
  if (after.flagged_cols.empty() && !after.flagged_rows.empty()) {
    const LineEstimate col = common_line_from_ratios(after.row_plain, after.row_weighted,
                                                     after.flagged_rows, after.delta, spec.dims.m);
    if (col.ok) {
      auto more = repair_full_col(copy, spec, col.line, after);
      repairs.insert(repairs.end(), more.begin(), more.end());
      if (syndrome_clean(resync(copy, spec, syndrome))) {
        return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::Corrected);
      }
    }
  }
  return post_check_failed();
}

CorrectionOutcome correct_one_sided(const GridCodedProduct& product, const Syndrome& syndrome,
                                    const GridCodeSpec& spec) {
  if (!syndrome.flagged_cols.empty()) {
    // Columns flagged with clean rows: either a corrupted left-input line
    // (consistent integer ratio in [1, n]) or damaged column parities.
    const LineEstimate row = common_line_from_ratios(syndrome.col_plain, syndrome.col_weighted,
                                                     syndrome.flagged_cols, syndrome.delta,
                                                     spec.dims.n);
    if (row.ok) {
      GridCodedProduct copy = product;
      auto repairs = repair_full_row(copy, spec, row.line, syndrome);
      if (syndrome_clean(resync(copy, spec, syndrome))) {
        return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::Corrected);
      }
    }
  } else {
    const LineEstimate col = common_line_from_ratios(syndrome.row_plain, syndrome.row_weighted,
                                                     syndrome.flagged_rows, syndrome.delta,
                                                     spec.dims.m);
    if (col.ok) {
      GridCodedProduct copy = product;
      auto repairs = repair_full_col(copy, spec, col.line, syndrome);
      if (syndrome_clean(resync(copy, spec, syndrome))) {
        return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::Corrected);
      }
    }
  }
  GridCodedProduct copy = product;
  auto repairs = repair_parity(copy, syndrome, spec);
  if (syndrome_clean(resync(copy, spec, syndrome))) {
    return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::ParityRepair);
  }
  return post_check_failed();
}

CorrectionOutcome correct_data_lines(const GridCodedProduct& product, const Syndrome& syndrome,
                                     const GridCodeSpec& spec) {
  const auto& rows = syndrome.flagged_rows;
  const auto& cols = syndrome.flagged_cols;
  // Repair from the side with fewer flagged lines; ties go to the row side.
  if (rows.size() <= cols.size()) {
    if (rows.size() == 1) {
      if (ratios_match_target(syndrome.col_plain, syndrome.col_weighted, cols, syndrome.delta,
                              spec.dims.n, static_cast<long long>(rows[0] + 1))) {
        GridCodedProduct copy = product;
        auto repairs = repair_single_row(copy, rows[0], cols, syndrome);
        if (syndrome_clean(resync(copy, spec, syndrome))) {
          return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::Corrected);
        }
      }
      return compound_row_side(product, syndrome, spec);
    }
    GridCodedProduct copy = product;
    auto repairs = repair_two_rows(copy, rows[0], rows[1], cols, syndrome);
    if (syndrome_clean(resync(copy, spec, syndrome))) {
      return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::Corrected);
    }
    return post_check_failed();
  }
  if (cols.size() == 1) {
    if (ratios_match_target(syndrome.row_plain, syndrome.row_weighted, rows, syndrome.delta,
                            spec.dims.m, static_cast<long long>(cols[0] + 1))) {
      GridCodedProduct copy = product;
      auto repairs = repair_single_col(copy, cols[0], rows, syndrome);
      if (syndrome_clean(resync(copy, spec, syndrome))) {
        return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::Corrected);
      }
    }
    return compound_col_side(product, syndrome, spec);
  }
  GridCodedProduct copy = product;
  auto repairs = repair_two_cols(copy, cols[0], cols[1], rows, syndrome);
  if (syndrome_clean(resync(copy, spec, syndrome))) {
    return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::Corrected);
  }
  return post_check_failed();
}

}  // namespace

CorrectionOutcome correct(const GridCodedProduct& product, const Syndrome& syndrome,
                          const GridCodeSpec& spec) {
  if (product.n() != spec.dims.n || product.m() != spec.dims.m) {
    throw std::invalid_argument("correct: spec and product dimensions differ");
  }
  switch (classify_pattern(syndrome)) {
    case PatternClass::Clean: {
      CorrectionOutcome outcome;
      outcome.kind = OutcomeKind::Clean;
      return outcome;
    }
    case PatternClass::Uncorrectable: {
      CorrectionOutcome outcome;
      outcome.kind = OutcomeKind::Uncorrectable;
      outcome.reason = "min(flagged rows, flagged columns) >= 3; recomputation required";
      return outcome;
    }
    case PatternClass::ParityRegion: {
      GridCodedProduct copy = product;
      auto repairs = repair_parity(copy, syndrome, spec);
      if (syndrome_clean(resync(copy, spec, syndrome))) {
        return corrected_outcome(std::move(copy), std::move(repairs), OutcomeKind::ParityRepair);
      }
      return post_check_failed();
    }
    case PatternClass::Inconsistent:
      return correct_one_sided(product, syndrome, spec);
    case PatternClass::Correctable:
      return correct_data_lines(product, syndrome, spec);
  }
  throw std::logic_error("unreachable pattern class");
}

std::vector<RepairEntry> repair_single_row(GridCodedProduct& product, std::size_t row,
                                           const std::vector<std::size_t>& cols,
                                           const Syndrome& syndrome) {
  std::vector<RepairEntry> repairs;
  for (std::size_t col : cols) {
    apply_repair(product, row, col, syndrome.col_plain[col], repairs);
  }
  return repairs;
}

std::vector<RepairEntry> repair_two_rows(GridCodedProduct& product, std::size_t row0,
                                         std::size_t row1, const std::vector<std::size_t>& cols,
                                         const Syndrome& syndrome) {
  if (row0 == row1) throw std::invalid_argument("repair_two_rows needs distinct rows");
  const double w0 = static_cast<double>(row0 + 1);
  const double w1 = static_cast<double>(row1 + 1);
  const double det = w1 - w0;  // nonzero for distinct rows
  if (det == 0.0) throw std::logic_error("singular two-row system");
  std::vector<RepairEntry> repairs;
  for (std::size_t col : cols) {
    const double plain = syndrome.col_plain[col];
    const double weighted = syndrome.col_weighted[col];
    const double e0 = (w1 * plain - weighted) / det;
    const double e1 = (weighted - w0 * plain) / det;
    apply_repair(product, row0, col, e0, repairs);
    apply_repair(product, row1, col, e1, repairs);
  }
  return repairs;
}

std::vector<RepairEntry> repair_single_col(GridCodedProduct& product, std::size_t col,
                                           const std::vector<std::size_t>& rows,
                                           const Syndrome& syndrome) {
  std::vector<RepairEntry> repairs;
  for (std::size_t row : rows) {
    apply_repair(product, row, col, syndrome.row_plain[row], repairs);
  }
  return repairs;
}

std::vector<RepairEntry> repair_two_cols(GridCodedProduct& product, std::size_t col0,
                                         std::size_t col1, const std::vector<std::size_t>& rows,
                                         const Syndrome& syndrome) {
  if (col0 == col1) throw std::invalid_argument("repair_two_cols needs distinct columns");
  const double w0 = static_cast<double>(col0 + 1);
  const double w1 = static_cast<double>(col1 + 1);
  const double det = w1 - w0;
  if (det == 0.0) throw std::logic_error("singular two-column system");
  std::vector<RepairEntry> repairs;
  for (std::size_t row : rows) {
    const double plain = syndrome.row_plain[row];
    const double weighted = syndrome.row_weighted[row];
    const double e0 = (w1 * plain - weighted) / det;
    const double e1 = (weighted - w0 * plain) / det;
    apply_repair(product, row, col0, e0, repairs);
    apply_repair(product, row, col1, e1, repairs);
  }
  return repairs;
}

std::vector<RepairEntry> repair_parity(GridCodedProduct& product, const Syndrome& syndrome,
                                       const GridCodeSpec& spec) {
  std::vector<RepairEntry> repairs;
  if (!syndrome.flagged_cols.empty() && syndrome.flagged_rows.empty()) {
    for (std::size_t col : syndrome.flagged_cols) {
      recompute_col_parities(product, spec, col, repairs);
    }
  }
  if (!syndrome.flagged_rows.empty() && syndrome.flagged_cols.empty()) {
    for (std::size_t row : syndrome.flagged_rows) {
      recompute_row_parities(product, spec, row, repairs);
    }
  }
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t q = 0; q < 2; ++q) {
      if (std::abs(syndrome.global[p][q]) > syndrome.delta) {
        recompute_corner(product, spec, p, q, repairs);
      }
    }
  }
  return repairs;
}

void write_repair_log_csv(const std::vector<RepairEntry>& repairs, std::ostream& out) {
  out << "row,col,old,new,e_hat\n";
  char buffer[32];
  auto put = [&](double value) {
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    out.write(buffer, result.ptr - buffer);
  };
  for (const RepairEntry& repair : repairs) {
    out << repair.row << ',' << repair.col << ',';
    put(repair.old_value);
    out.put(',');
    put(repair.new_value);
    out.put(',');
    put(repair.estimated_error);
    out.put('\n');
  }
}

}  // namespace gridmul
