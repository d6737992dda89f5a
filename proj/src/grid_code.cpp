#include "gridmul/grid_code.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gridmul {

namespace {

void require_positive(const Dims& dims) {
  if (dims.n == 0 || dims.k == 0 || dims.m == 0) {
    throw std::invalid_argument("grid code dimensions must be positive");
  }
}

std::string shape_string(const DenseMatrix& matrix) {
  return std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols());
}

}  // namespace

GridCodeSpec GridCodeSpec::for_dims(Dims dims) {
  require_positive(dims);
  GridCodeSpec spec;
  spec.dims = dims;
  spec.row_check_plain.assign(dims.n, 1.0);
  spec.row_check_weighted.resize(dims.n);
  for (std::size_t i = 0; i < dims.n; ++i) spec.row_check_weighted[i] = static_cast<double>(i + 1);
  spec.col_check_plain.assign(dims.m, 1.0);
  spec.col_check_weighted.resize(dims.m);
  for (std::size_t j = 0; j < dims.m; ++j) spec.col_check_weighted[j] = static_cast<double>(j + 1);
  return spec;
}

GridCodedProduct::GridCodedProduct(DenseMatrix full, Dims dims)
    : full_(std::move(full)), dims_(dims) {
  require_positive(dims_);
  if (full_.rows() != dims_.n + 2 || full_.cols() != dims_.m + 2) {
    throw std::invalid_argument("coded product must be (n+2)x(m+2), got " + shape_string(full_));
  }
}

DenseMatrix GridCodedProduct::data_block() const {
  DenseMatrix out(dims_.n, dims_.m);
  for (std::size_t i = 0; i < dims_.n; ++i)
    for (std::size_t j = 0; j < dims_.m; ++j) out(i, j) = full_(i, j);
  return out;
}

DenseMatrix encode_left(const DenseMatrix& a, const GridCodeSpec& spec) {
  const std::size_t n = spec.dims.n;
  if (a.rows() != n || a.cols() != spec.dims.k) {
    throw std::invalid_argument("encode_left expects " + std::to_string(n) + "x" +
                                std::to_string(spec.dims.k) + ", got " + shape_string(a));
  }
  DenseMatrix out(n + 2, a.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double plain = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      plain += a(i, j);
      weighted += spec.row_check_weighted[i] * a(i, j);
    }
    out(n, j) = plain;
    out(n + 1, j) = weighted;
  }
  return out;
}

DenseMatrix encode_right(const DenseMatrix& b, const GridCodeSpec& spec) {
  const std::size_t m = spec.dims.m;
  if (b.rows() != spec.dims.k || b.cols() != m) {
    throw std::invalid_argument("encode_right expects " + std::to_string(spec.dims.k) + "x" +
                                std::to_string(m) + ", got " + shape_string(b));
  }
  DenseMatrix out(b.rows(), m + 2);
  for (std::size_t i = 0; i < b.rows(); ++i) {
    double plain = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      out(i, j) = b(i, j);
      plain += b(i, j);
      weighted += spec.col_check_weighted[j] * b(i, j);
    }
    out(i, m) = plain;
    out(i, m + 1) = weighted;
  }
  return out;
}

GridCodedProduct coded_multiply(const DenseMatrix& a_bar, const DenseMatrix& b_bar,
                                const GridCodeSpec& spec) {
  if (a_bar.rows() != spec.dims.n + 2 || a_bar.cols() != spec.dims.k) {
    throw std::invalid_argument("coded_multiply: left factor has shape " + shape_string(a_bar) +
                                ", expected " + std::to_string(spec.dims.n + 2) + "x" +
                                std::to_string(spec.dims.k));
  }
  if (b_bar.rows() != spec.dims.k || b_bar.cols() != spec.dims.m + 2) {
    throw std::invalid_argument("coded_multiply: right factor has shape " + shape_string(b_bar) +
                                ", expected " + std::to_string(spec.dims.k) + "x" +
                                std::to_string(spec.dims.m + 2));
  }
  return GridCodedProduct(multiply(a_bar, b_bar), spec.dims);
}

std::string ConstraintViolation::label() const {
  switch (kind) {
    case ConstraintKind::RowPlain:
      return "row_plain[" + std::to_string(index) + "]";
    case ConstraintKind::RowWeighted:
      return "row_weighted[" + std::to_string(index) + "]";
    case ConstraintKind::ColPlain:
      return "col_plain[" + std::to_string(index) + "]";
    case ConstraintKind::ColWeighted:
      return "col_weighted[" + std::to_string(index) + "]";
    case ConstraintKind::Global:
      return "global[" + std::to_string(index) + "][" + std::to_string(index2) + "]";
  }
  return "?";
}

std::vector<ConstraintViolation> validate_grid_structure(const GridCodedProduct& product,
                                                         const GridCodeSpec& spec, double tol) {
  const std::size_t n = spec.dims.n;
  const std::size_t m = spec.dims.m;
  if (product.n() != n || product.m() != m) {
    throw std::invalid_argument("validate_grid_structure: spec and product dimensions differ");
  }
  const DenseMatrix& full = product.full();
  std::vector<ConstraintViolation> violations;

  auto check = [&](ConstraintKind kind, std::size_t index, std::size_t index2, double residual) {
    if (std::abs(residual) > tol) violations.push_back({kind, index, index2, residual});
  };

  for (std::size_t i = 0; i < n; ++i) {
    double plain = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      plain += full(i, j);
      weighted += spec.col_check_weighted[j] * full(i, j);
    }
    check(ConstraintKind::RowPlain, i, 0, plain - full(i, m));
    check(ConstraintKind::RowWeighted, i, 0, weighted - full(i, m + 1));
  }
  for (std::size_t j = 0; j < m; ++j) {
    double plain = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      plain += full(i, j);
      weighted += spec.row_check_weighted[i] * full(i, j);
    }
    check(ConstraintKind::ColPlain, j, 0, plain - full(n, j));
    check(ConstraintKind::ColWeighted, j, 0, weighted - full(n + 1, j));
  }

  // Global constraints: bilinear forms over the full matrix built from the
  // two column-side and two row-side check vectors, each extended with -1 at
  // its own parity line and 0 at the other.
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t q = 0; q < 2; ++q) {
      double total = 0.0;
      for (std::size_t i = 0; i < n + 2; ++i) {
        double alpha;
        if (i < n) {
          alpha = p == 0 ? 1.0 : spec.row_check_weighted[i];
        } else {
          alpha = (i == n + p) ? -1.0 : 0.0;
        }
        if (alpha == 0.0) continue;
        double row_dot = 0.0;
        for (std::size_t j = 0; j < m + 2; ++j) {
          double beta;
          if (j < m) {
            beta = q == 0 ? 1.0 : spec.col_check_weighted[j];
          } else {
            beta = (j == m + q) ? -1.0 : 0.0;
          }
          row_dot += beta * full(i, j);
        }
        total += alpha * row_dot;
      }
      check(ConstraintKind::Global, p, q, total);
    }
  }
  return violations;
}

double structural_tolerance(const Dims& dims, double max_abs_a, double max_abs_b) {
  const double u = std::ldexp(1.0, -53);
  const double side = static_cast<double>(std::max(dims.n, dims.m));
  return 64.0 * u * static_cast<double>(dims.k) * side * side * max_abs_a * max_abs_b;
}

void write_coded_binary(const GridCodedProduct& product, std::ostream& out) {
  write_matrix_binary(product.full(), out);
  const std::uint64_t dims[2] = {product.n(), product.m()};
  for (std::uint64_t value : dims) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xffu);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

GridCodedProduct read_coded_binary(std::istream& in) {
  DenseMatrix full = read_matrix_binary(in);
  std::uint64_t dims[2] = {0, 0};
  for (std::uint64_t& value : dims) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw std::invalid_argument("truncated coded product trailer");
    value = 0;
    for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  }
  const std::size_t n = static_cast<std::size_t>(dims[0]);
  const std::size_t m = static_cast<std::size_t>(dims[1]);
  if (full.rows() != n + 2 || full.cols() != m + 2) {
    throw std::invalid_argument("coded product trailer disagrees with matrix shape");
  }
  // k is not recorded in the trailer; use 1 as a placeholder since block
  // views only need (n, m).
  return GridCodedProduct(std::move(full), Dims{n, 1, m});
}

}  // namespace gridmul
