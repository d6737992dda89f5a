#include "gridmul/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gridmul/rng.hpp"

namespace gridmul {

namespace {

std::string shape_string(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void require_finite(const std::vector<double>& entries) {
  for (double v : entries) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("matrix entry is not finite");
    }
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("matrix dimensions must be positive, got " +
                                shape_string(rows, cols));
  }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("matrix dimensions must be positive, got " +
                                shape_string(rows, cols));
  }
  if (entries_.size() != rows * cols) {
    throw std::invalid_argument("entry count " + std::to_string(entries_.size()) +
                                " does not match shape " + shape_string(rows, cols));
  }
  require_finite(entries_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  if (r == 0) throw std::invalid_argument("matrix needs at least one row");
  const std::size_t c = rows.begin()->size();
  std::vector<double> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("ragged rows in matrix literal");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(entries));
}

double DenseMatrix::max_abs() const {
  double out = 0.0;
  for (double v : entries_) out = std::max(out, std::abs(v));
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("multiply shape mismatch: " + shape_string(a.rows(), a.cols()) +
                                " times " + shape_string(b.rows(), b.cols()));
  }
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t k = a.cols();
  const std::size_t m = b.cols();
  // Accumulates contributions in ascending inner index per output entry,
  // matching the naive triple loop bit for bit.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out_row = &out(i, 0);
    for (std::size_t l = 0; l < k; ++l) {
      const double ail = a(i, l);
      const double* b_row = b.row_span(l).data();
      for (std::size_t j = 0; j < m; ++j) {
        out_row[j] += ail * b_row[j];
      }
    }
  }
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("add shape mismatch: " + shape_string(a.rows(), a.cols()) +
                                " plus " + shape_string(b.rows(), b.cols()));
  }
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("subtract shape mismatch: " + shape_string(a.rows(), a.cols()) +
                                " minus " + shape_string(b.rows(), b.cols()));
  }
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("matrix dimensions must be positive, got " +
                                shape_string(rows, cols));
  }
  Uniform rng(seed);
  DenseMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = 2.0 * rng.unit() - 1.0;
  return out;
}

void write_matrix_csv(const DenseMatrix& matrix, std::ostream& out) {
  char buffer[32];
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      const auto result = std::to_chars(buffer, buffer + sizeof(buffer), matrix(i, j));
      if (j) out.put(',');
      out.write(buffer, result.ptr - buffer);
    }
    out.put('\n');
  }
}

DenseMatrix read_matrix_csv(std::istream& in) {
  std::vector<double> entries;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t line_cols = 0;
    const char* cursor = line.data();
    const char* end = line.data() + line.size();
    while (cursor < end) {
      double value = 0.0;
      const auto result = std::from_chars(cursor, end, value);
      if (result.ec != std::errc{}) {
        throw std::invalid_argument("unparseable CSV value in line: " + line);
      }
      entries.push_back(value);
      ++line_cols;
      cursor = result.ptr;
      if (cursor < end) {
        if (*cursor != ',') throw std::invalid_argument("expected ',' in CSV line: " + line);
        ++cursor;
      }
    }
    if (rows == 0) {
      cols = line_cols;
    } else if (line_cols != cols) {
      throw std::invalid_argument("ragged CSV: row " + std::to_string(rows) + " has " +
                                  std::to_string(line_cols) + " values, expected " +
                                  std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw std::invalid_argument("empty CSV matrix");
  return DenseMatrix(rows, cols, std::move(entries));
}

namespace {

void write_u32_le(std::ostream& out, std::uint32_t value) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw std::invalid_argument("truncated binary matrix header");
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) value |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void write_matrix_binary(const DenseMatrix& matrix, std::ostream& out) {
  write_u32_le(out, static_cast<std::uint32_t>(matrix.rows()));
  write_u32_le(out, static_cast<std::uint32_t>(matrix.cols()));
  for (double v : matrix.entries()) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

DenseMatrix read_matrix_binary(std::istream& in) {
  const std::uint32_t rows = read_u32_le(in);
  const std::uint32_t cols = read_u32_le(in);
  std::vector<double> entries(static_cast<std::size_t>(rows) * cols);
  for (double& v : entries) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw std::invalid_argument("truncated binary matrix payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    std::memcpy(&v, &bits, sizeof(v));
  }
  return DenseMatrix(rows, cols, std::move(entries));
}

}  // namespace gridmul
