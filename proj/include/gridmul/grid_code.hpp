#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridmul/matrix.hpp"

namespace gridmul {

/// Check vectors of the grid code: a plain (all-ones) and a weighted
/// (1, 2, ..., length) checksum per side. The weights are small integers and
/// therefore exact in 64-bit floats.
struct GridCodeSpec {
  Dims dims;
  std::vector<double> row_check_plain;     // length n, all ones
  std::vector<double> row_check_weighted;  // length n, values 1..n
  std::vector<double> col_check_plain;     // length m, all ones
  std::vector<double> col_check_weighted;  // length m, values 1..m

  static GridCodeSpec for_dims(Dims dims);
};

/// The (n+2) x (m+2) coded product. Row-major layout matching the block
/// structure: the n-by-m data block at the top left, two parity columns on
/// the right of each data row, two parity rows below each data column, and
/// the four global parity entries in the bottom-right corner.
class GridCodedProduct {
 public:
  GridCodedProduct(DenseMatrix full, Dims dims);

  const DenseMatrix& full() const { return full_; }
  const Dims& dims() const { return dims_; }
  std::size_t n() const { return dims_.n; }
  std::size_t m() const { return dims_.m; }

  double at(std::size_t i, std::size_t j) const { return full_(i, j); }
  void set(std::size_t i, std::size_t j, double value) { full_(i, j) = value; }

  /// Data-block accessors, 0-based over n x m.
  double data(std::size_t i, std::size_t j) const { return full_(i, j); }
  void set_data(std::size_t i, std::size_t j, double value) { full_(i, j) = value; }

  /// Copy of the data block as a standalone matrix.
  DenseMatrix data_block() const;

 private:
  DenseMatrix full_;
  Dims dims_;
};

/// Stacks two parity rows (plain and weighted column sums) under `a`,
/// producing an (n+2) x k matrix.
DenseMatrix encode_left(const DenseMatrix& a, const GridCodeSpec& spec);

/// Appends two parity columns (plain and weighted row sums) to `b`,
/// producing a k x (m+2) matrix.
DenseMatrix encode_right(const DenseMatrix& b, const GridCodeSpec& spec);

/// Multiplies encoded factors into the full coded product. The data block of
/// the result is bit-identical to multiply(a, b) on fault-free inputs.
GridCodedProduct coded_multiply(const DenseMatrix& a_bar, const DenseMatrix& b_bar,
                                const GridCodeSpec& spec);

enum class ConstraintKind { RowPlain, RowWeighted, ColPlain, ColWeighted, Global };

struct ConstraintViolation {
  ConstraintKind kind;
  std::size_t index;   // data row/col index; for Global the row-weight selector (0 plain, 1 weighted)
  std::size_t index2;  // for Global the column-weight selector; unused otherwise
  double residual;

  std::string label() const;
};

/// Evaluates every structural constraint of the code and returns those whose
/// residual magnitude exceeds `tol`. Empty result means the product is
/// grid-like within `tol`.
std::vector<ConstraintViolation> validate_grid_structure(const GridCodedProduct& product,
                                                         const GridCodeSpec& spec, double tol);

/// Fault-free structural tolerance: 64 * u * k * max(n,m)^2 * maxA * maxB
/// with u = 2^-53. Weighted checksums scale rounding residuals by up to
/// max(n, m), which this bound absorbs with margin.
double structural_tolerance(const Dims& dims, double max_abs_a, double max_abs_b);

/// Binary format: the full matrix in the matrix_core binary layout plus a
/// 16-byte trailer recording (n, m) as little-endian uint64, so block views
/// can be reconstructed on read.
void write_coded_binary(const GridCodedProduct& product, std::ostream& out);
GridCodedProduct read_coded_binary(std::istream& in);

}  // namespace gridmul
