#include "gridmul/syndrome.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gridmul {

bool Syndrome::globals_within(double tol) const {
  for (const auto& row : global)
    for (double g : row)
      if (std::abs(g) > tol) return false;
  return true;
}

Syndrome compute_syndrome(const GridCodedProduct& product, const GridCodeSpec& spec, double delta,
                          const DetectorConfig& config) {
  if (delta < 0.0) throw std::invalid_argument("delta must be non-negative");
  const std::size_t n = spec.dims.n;
  const std::size_t m = spec.dims.m;
  if (product.n() != n || product.m() != m) {
    throw std::invalid_argument("compute_syndrome: spec and product dimensions differ");
  }
  const DenseMatrix& full = product.full();

  Syndrome s;
  s.delta = delta;
  s.weighted_delta_scale = config.weighted_delta_scale;
  s.row_plain.resize(n);
  s.row_weighted.resize(n);
  s.col_plain.assign(m, 0.0);
  s.col_weighted.assign(m, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    double plain = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      plain += full(i, j);
      weighted += spec.col_check_weighted[j] * full(i, j);
    }
    s.row_plain[i] = plain - full(i, m);
    s.row_weighted[i] = weighted - full(i, m + 1);
  }
  for (std::size_t j = 0; j < m; ++j) {
    double plain = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      plain += full(i, j);
      weighted += spec.row_check_weighted[i] * full(i, j);
    }
    s.col_plain[j] = plain - full(n, j);
    s.col_weighted[j] = weighted - full(n + 1, j);
  }

  // Global residuals: the four weighted data-block sums against the stored
  // corner entries.
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t q = 0; q < 2; ++q) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double alpha = p == 0 ? 1.0 : spec.row_check_weighted[i];
        double row_dot = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          const double beta = q == 0 ? 1.0 : spec.col_check_weighted[j];
          row_dot += beta * full(i, j);
        }
        total += alpha * row_dot;
      }
      s.global[p][q] = total - full(n + p, m + q);
    }
  }

  const double weighted_delta = delta * config.weighted_delta_scale;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(s.row_plain[i]) > delta || std::abs(s.row_weighted[i]) > weighted_delta) {
      s.flagged_rows.push_back(i);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(s.col_plain[j]) > delta || std::abs(s.col_weighted[j]) > weighted_delta) {
      s.flagged_cols.push_back(j);
    }
  }
  return s;
}

PatternClass classify_pattern(const Syndrome& syndrome) {
  const bool rows_empty = syndrome.flagged_rows.empty();
  const bool cols_empty = syndrome.flagged_cols.empty();
  if (rows_empty && cols_empty) {
    return syndrome.globals_within(syndrome.delta) ? PatternClass::Clean
                                                   : PatternClass::ParityRegion;
  }
  if (rows_empty != cols_empty) return PatternClass::Inconsistent;
  if (std::min(syndrome.flagged_rows.size(), syndrome.flagged_cols.size()) >= 3) {
    return PatternClass::Uncorrectable;
  }
  return PatternClass::Correctable;
}

namespace {

void append_double(std::string& line, double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  line.append(buffer, result.ptr);
}

}  // namespace

void dump_syndrome(const Syndrome& syndrome, std::ostream& out) {
  auto flagged = [](const std::vector<std::size_t>& set, std::size_t index) {
    return std::binary_search(set.begin(), set.end(), index);
  };
  for (std::size_t i = 0; i < syndrome.row_plain.size(); ++i) {
    std::string line = "ROW " + std::to_string(i) + " plain=";
    append_double(line, syndrome.row_plain[i]);
    line += " weighted=";
    append_double(line, syndrome.row_weighted[i]);
    line += " flagged=";
    line += flagged(syndrome.flagged_rows, i) ? '1' : '0';
    out << line << '\n';
  }
  for (std::size_t j = 0; j < syndrome.col_plain.size(); ++j) {
    std::string line = "COL " + std::to_string(j) + " plain=";
    append_double(line, syndrome.col_plain[j]);
    line += " weighted=";
    append_double(line, syndrome.col_weighted[j]);
    line += " flagged=";
    line += flagged(syndrome.flagged_cols, j) ? '1' : '0';
    out << line << '\n';
  }
}

}  // namespace gridmul
