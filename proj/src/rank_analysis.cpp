#include "gridmul/rank_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gridmul {

namespace {

void require_increasing(const std::array<std::size_t, 3>& idx, const char* side) {
  if (idx[0] < 1 || idx[0] >= idx[1] || idx[1] >= idx[2]) {
    throw std::invalid_argument(std::string(side) + " indices must be strictly increasing and >= 1");
  }
}

/// Elimination with full pivoting. Returns the pivot magnitudes in the order
/// they were chosen; trailing near-zero pivots reveal the rank deficiency.
/// `column_order` (optional) receives the column permutation: the first
/// `pivots` entries are pivot columns, the rest are free.
std::vector<double> eliminate(DenseMatrix work, double tol, std::size_t* rank_out,
                              std::vector<std::size_t>* column_order,
                              DenseMatrix* echelon_out) {
  const std::size_t rows = work.rows();
  const std::size_t cols = work.cols();
  std::vector<std::size_t> col_perm(cols);
  for (std::size_t j = 0; j < cols; ++j) col_perm[j] = j;

  std::vector<double> pivots;
  double largest = 0.0;
  std::size_t step = 0;
  const std::size_t steps = std::min(rows, cols);
  for (; step < steps; ++step) {
    // Full pivot over the remaining submatrix.
    std::size_t pivot_row = step;
    std::size_t pivot_col = step;
    double best = 0.0;
    for (std::size_t i = step; i < rows; ++i) {
      for (std::size_t j = step; j < cols; ++j) {
        const double candidate = std::abs(work(i, j));
        if (candidate > best) {
          best = candidate;
          pivot_row = i;
          pivot_col = j;
        }
      }
    }
    largest = std::max(largest, best);
    if (best <= tol * largest || best == 0.0) break;

    if (pivot_row != step) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(work(step, j), work(pivot_row, j));
    }
    if (pivot_col != step) {
      for (std::size_t i = 0; i < rows; ++i) std::swap(work(i, step), work(i, pivot_col));
      std::swap(col_perm[step], col_perm[pivot_col]);
    }
    pivots.push_back(best);
    const double pivot = work(step, step);
    for (std::size_t i = step + 1; i < rows; ++i) {
      const double factor = work(i, step) / pivot;
      if (factor == 0.0) continue;
      work(i, step) = 0.0;
      for (std::size_t j = step + 1; j < cols; ++j) work(i, j) -= factor * work(step, j);
    }
  }
  if (rank_out) *rank_out = pivots.size();
  if (column_order) *column_order = std::move(col_perm);
  if (echelon_out) *echelon_out = std::move(work);
  return pivots;
}

}  // namespace

ConstraintSystem build_e33_system(const std::array<std::size_t, 3>& s,
                                  const std::array<std::size_t, 3>& t) {
  require_increasing(s, "row");
  require_increasing(t, "column");

  ConstraintSystem system;
  system.matrix = DenseMatrix(16, 9);
  DenseMatrix& M = system.matrix;
  // Unknown order is row-major over the support: e(s1,t1), e(s1,t2), ...,
  // e(s3,t3). Column a + 3*b holds e(s_{b+1}, t_{a+1}).
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t a = 0; a < 3; ++a)
      system.unknowns.emplace_back(s[b], t[a]);

  std::size_t row = 0;
  auto label = [&](const std::string& text) { system.row_labels.push_back(text); };

  // Two parity constraints per support row.
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t a = 0; a < 3; ++a) M(row, 3 * b + a) = 1.0;
    label("row_plain(s" + std::to_string(b + 1) + ")");
    ++row;
    for (std::size_t a = 0; a < 3; ++a) M(row, 3 * b + a) = static_cast<double>(t[a]);
    label("row_weighted(s" + std::to_string(b + 1) + ")");
    ++row;
  }
  // Weighted column constraints, then plain column constraints.
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) M(row, 3 * b + a) = static_cast<double>(s[b]);
    label("col_weighted(t" + std::to_string(a + 1) + ")");
    ++row;
  }
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) M(row, 3 * b + a) = 1.0;
    label("col_plain(t" + std::to_string(a + 1) + ")");
    ++row;
  }
  // Four global constraints with entries 1, t_a, s_b and t_a*s_b.
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t a = 0; a < 3; ++a) M(row, 3 * b + a) = 1.0;
  label("global_plain_plain");
  ++row;
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t a = 0; a < 3; ++a) M(row, 3 * b + a) = static_cast<double>(t[a]);
  label("global_plain_weighted");
  ++row;
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t a = 0; a < 3; ++a) M(row, 3 * b + a) = static_cast<double>(s[b]);
  label("global_weighted_plain");
  ++row;
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t a = 0; a < 3; ++a)
      M(row, 3 * b + a) = static_cast<double>(t[a]) * static_cast<double>(s[b]);
  label("global_weighted_weighted");
  return system;
}

std::size_t numerical_rank(const ConstraintSystem& system, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("rank tolerance must be positive");
  std::size_t rank = 0;
  eliminate(system.matrix, tol, &rank, nullptr, nullptr);
  return rank;
}

std::vector<double> nullspace_witness(const ConstraintSystem& system, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
  const std::size_t cols = system.matrix.cols();
  std::size_t rank = 0;
  std::vector<std::size_t> col_perm;
  DenseMatrix echelon;
  eliminate(system.matrix, tol, &rank, &col_perm, &echelon);
  if (rank >= cols) {
    throw FullRankError("constraint system has full column rank; no nullspace witness exists");
  }

  // Set the first free (permuted) column to 1 and back-substitute through
  // the echelon factor.
  std::vector<double> permuted(cols, 0.0);
  permuted[rank] = 1.0;
  for (std::size_t step = rank; step-- > 0;) {
    double sum = 0.0;
    for (std::size_t j = step + 1; j <= rank; ++j) sum += echelon(step, j) * permuted[j];
    permuted[step] = -sum / echelon(step, step);
  }
  std::vector<double> witness(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) witness[col_perm[j]] = permuted[j];

  double norm = 0.0;
  for (double v : witness) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : witness) v /= norm;

  // Residual check against the original system.
  double residual = 0.0;
  for (std::size_t i = 0; i < system.matrix.rows(); ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < cols; ++j) dot += system.matrix(i, j) * witness[j];
    residual = std::max(residual, std::abs(dot));
  }
  if (residual > tol * system.matrix.max_abs() * static_cast<double>(cols)) {
    throw FullRankError("nullspace witness residual exceeds tolerance");
  }

  // For a 3x3 support the witness must be an outer product u (x) w with both
  // factors orthogonal to the plain and weighted check vectors restricted to
  // the support indices. Anything else would contradict the rank analysis.
  if (cols == 9 && system.unknowns.size() == 9) {
    std::size_t bi = 0;
    std::size_t ai = 0;
    double peak = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
      for (std::size_t a = 0; a < 3; ++a) {
        if (std::abs(witness[3 * b + a]) > peak) {
          peak = std::abs(witness[3 * b + a]);
          bi = b;
          ai = a;
        }
      }
    }
    const double anchor = witness[3 * bi + ai];
    std::array<double, 3> u{};
    std::array<double, 3> w{};
    for (std::size_t b = 0; b < 3; ++b) u[b] = witness[3 * b + ai];
    for (std::size_t a = 0; a < 3; ++a) w[a] = witness[3 * bi + a] / anchor;
    double structure_error = 0.0;
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t a = 0; a < 3; ++a)
        structure_error = std::max(structure_error, std::abs(witness[3 * b + a] - u[b] * w[a]));
    double plain_u = 0.0, weighted_u = 0.0, plain_w = 0.0, weighted_w = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
      plain_u += u[b];
      weighted_u += static_cast<double>(system.unknowns[3 * b].first) * u[b];
    }
    for (std::size_t a = 0; a < 3; ++a) {
      plain_w += w[a];
      weighted_w += static_cast<double>(system.unknowns[a].second) * w[a];
    }
    const double scale = 1e3 * tol;
    const double index_scale =
        static_cast<double>(std::max(system.unknowns[6].first, system.unknowns[2].second));
    if (structure_error > scale || std::abs(plain_u) > scale ||
        std::abs(weighted_u) > scale * index_scale || std::abs(plain_w) > scale ||
        std::abs(weighted_w) > scale * index_scale) {
      throw FullRankError("nullspace witness does not have the expected rank-one structure");
    }
  }
  return witness;
}

bool certify_correctable_rank(const std::vector<std::pair<std::size_t, std::size_t>>& support) {
  if (support.empty()) return true;
  std::set<std::size_t> row_set;
  std::set<std::size_t> col_set;
  for (const auto& [r, c] : support) {
    if (r < 1 || c < 1) throw std::invalid_argument("support coordinates are 1-based");
    row_set.insert(r);
    col_set.insert(c);
  }
  const std::vector<std::size_t> rows(row_set.begin(), row_set.end());
  const std::vector<std::size_t> cols(col_set.begin(), col_set.end());

  ConstraintSystem system;
  const std::size_t unknowns = support.size();
  const std::size_t constraints = 2 * rows.size() + 2 * cols.size() + 4;
  system.matrix = DenseMatrix(constraints, unknowns);
  system.unknowns = support;

  std::size_t row = 0;
  auto fill = [&](auto&& coefficient, const std::string& text) {
    for (std::size_t u = 0; u < unknowns; ++u) {
      system.matrix(row, u) = coefficient(support[u].first, support[u].second);
    }
    system.row_labels.push_back(text);
    ++row;
  };
  for (std::size_t r : rows) {
    fill([&](std::size_t sr, std::size_t) { return sr == r ? 1.0 : 0.0; },
         "row_plain(" + std::to_string(r) + ")");
    fill([&](std::size_t sr, std::size_t sc) {
      return sr == r ? static_cast<double>(sc) : 0.0;
    },
         "row_weighted(" + std::to_string(r) + ")");
  }
  for (std::size_t c : cols) {
    fill([&](std::size_t, std::size_t sc) { return sc == c ? 1.0 : 0.0; },
         "col_plain(" + std::to_string(c) + ")");
    fill([&](std::size_t sr, std::size_t sc) {
      return sc == c ? static_cast<double>(sr) : 0.0;
    },
         "col_weighted(" + std::to_string(c) + ")");
  }
  fill([](std::size_t, std::size_t) { return 1.0; }, "global_plain_plain");
  fill([](std::size_t, std::size_t sc) { return static_cast<double>(sc); },
       "global_plain_weighted");
  fill([](std::size_t sr, std::size_t) { return static_cast<double>(sr); },
       "global_weighted_plain");
  fill([](std::size_t sr, std::size_t sc) { return static_cast<double>(sr * sc); },
       "global_weighted_weighted");

  return numerical_rank(system, 1e-9) == unknowns;
}

}  // namespace gridmul
