#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gridmul/matrix.hpp"

namespace gridmul {

/// Homogeneous constraint system over a set of unknown error symbols.
/// Rows are parity constraints, columns are the unknowns in the order given
/// by `unknowns` (1-based data coordinates, row-major over the support).
struct ConstraintSystem {
  DenseMatrix matrix;
  std::vector<std::string> row_labels;
  std::vector<std::pair<std::size_t, std::size_t>> unknowns;
};

/// The 16 x 9 system coupling the nine unknowns of a 3-row by 3-column error
/// support through 6 row-parity, 6 column-parity and 4 global-parity
/// constraints. Indices are 1-based and must be strictly increasing.
///
/// Row order: the two parity constraints of each support row (plain then
/// weighted, by row), the weighted column constraints, the plain column
/// constraints, then the four global constraints (plain*plain, plain*col-
/// weighted, row-weighted*plain, row-weighted*col-weighted).
ConstraintSystem build_e33_system(const std::array<std::size_t, 3>& s,
                                  const std::array<std::size_t, 3>& t);

/// Numerical rank by elimination with full pivoting: pivots are counted
/// while their magnitude exceeds tol times the largest pivot encountered.
std::size_t numerical_rank(const ConstraintSystem& system, double tol);

/// Thrown when a system expected to be rank deficient is not.
struct FullRankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unit-norm nullspace vector v with ||M v|| <= tol * ||v||. For 3x3-support
/// systems the witness is additionally verified to factor as the outer
/// product of two vectors that each have zero plain and zero weighted sum
/// over the support indices. Throws FullRankError when no deficiency exists.
std::vector<double> nullspace_witness(const ConstraintSystem& system, double tol);

/// Builds the parity-constraint system restricted to an explicit support and
/// reports whether it determines every unknown (rank equals the number of
/// support cells). Support coordinates are 1-based.
bool certify_correctable_rank(const std::vector<std::pair<std::size_t, std::size_t>>& support);

}  // namespace gridmul
