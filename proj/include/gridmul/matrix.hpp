#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace gridmul {

/// Dense row-major matrix of 64-bit reals.
///
/// Entries coming from external data (vectors, CSV, binary streams) are
/// validated to be finite on construction; results of arithmetic are finite
/// by construction for the value ranges this library works with.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  /// Zero matrix of the given shape.
  DenseMatrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of `entries` (row-major, length rows*cols).
  /// Throws std::invalid_argument on length mismatch or non-finite entries.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

  std::span<const double> row_span(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }

  const std::vector<double>& entries() const { return entries_; }

  double max_abs() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// Problem dimensions for a product of an n-by-k and a k-by-m matrix.
struct Dims {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t m = 0;
};

/// C = A * B with a fixed summation order (inner dimension ascending per
/// output entry), so results are bit-stable and comparable against a naive
/// triple loop. Throws std::invalid_argument naming both shapes on mismatch.
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

/// Matrix with i.i.d. entries uniform on [-1, 1], deterministic in `seed`.
DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// CSV: one row per line, ',' separated, '.' decimal, round-trip precision.
void write_matrix_csv(const DenseMatrix& matrix, std::ostream& out);
DenseMatrix read_matrix_csv(std::istream& in);

/// Binary: 8-byte header (rows, cols as little-endian uint32) followed by
/// row-major little-endian IEEE-754 doubles. Round trip is bit exact.
void write_matrix_binary(const DenseMatrix& matrix, std::ostream& out);
DenseMatrix read_matrix_binary(std::istream& in);

}  // namespace gridmul
