#include "gridmul/checksum_baseline.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gridmul {

ChecksumCodedProduct::ChecksumCodedProduct(DenseMatrix full, std::size_t n, std::size_t m)
    : full_(std::move(full)), n_(n), m_(m) {
  if (full_.rows() != n + 1 || full_.cols() != m + 1) {
    throw std::invalid_argument("checksum product must be (n+1)x(m+1)");
  }
}

DenseMatrix ChecksumCodedProduct::data_block() const {
  DenseMatrix out(n_, m_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < m_; ++j) out(i, j) = full_(i, j);
  return out;
}

DenseMatrix checksum_encode_left(const DenseMatrix& a) {
  DenseMatrix out(a.rows() + 1, a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      out(i, j) = a(i, j);
      sum += a(i, j);
    }
    out(a.rows(), j) = sum;
  }
  return out;
}

DenseMatrix checksum_encode_right(const DenseMatrix& b) {
  DenseMatrix out(b.rows(), b.cols() + 1);
  for (std::size_t i = 0; i < b.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < b.cols(); ++j) {
      out(i, j) = b(i, j);
      sum += b(i, j);
    }
    out(i, b.cols()) = sum;
  }
  return out;
}

ChecksumCodedProduct checksum_product_from(const DenseMatrix& a_enc, const DenseMatrix& b_enc) {
  return ChecksumCodedProduct(multiply(a_enc, b_enc), a_enc.rows() - 1, b_enc.cols() - 1);
}

ChecksumCodedProduct checksum_multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("checksum_multiply shape mismatch: " + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()) + " times " +
                                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  return checksum_product_from(checksum_encode_left(a), checksum_encode_right(b));
}

ChecksumOutcome checksum_detect_correct(const ChecksumCodedProduct& product, double delta) {
  if (delta < 0.0) throw std::invalid_argument("delta must be non-negative");
  const std::size_t n = product.n();
  const std::size_t m = product.m();
  const DenseMatrix& full = product.full();

  std::vector<double> row_residual(n, 0.0);
  std::vector<double> col_residual(m, 0.0);
  ChecksumOutcome outcome;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) sum += full(i, j);
    row_residual[i] = sum - full(i, m);
    if (std::abs(row_residual[i]) > delta) outcome.flagged_rows.push_back(i);
  }
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += full(i, j);
    col_residual[j] = sum - full(n, j);
    if (std::abs(col_residual[j]) > delta) outcome.flagged_cols.push_back(j);
  }

  if (outcome.flagged_rows.empty() && outcome.flagged_cols.empty()) {
    outcome.kind = OutcomeKind::Clean;
    return outcome;
  }
  if (outcome.flagged_rows.size() == 1 && outcome.flagged_cols.size() == 1) {
    const std::size_t i = outcome.flagged_rows[0];
    const std::size_t j = outcome.flagged_cols[0];
    ChecksumCodedProduct repaired = product;
    const double old_value = repaired.data(i, j);
    const double new_value = old_value - row_residual[i];
    repaired.set_data(i, j, new_value);
    outcome.kind = OutcomeKind::Corrected;
    outcome.repairs.push_back({i, j, old_value, new_value, row_residual[i]});
    outcome.corrected = std::move(repaired);
    return outcome;
  }
  outcome.kind = OutcomeKind::Uncorrectable;
  outcome.reason = "error pattern is beyond single-checksum correction";
  return outcome;
}

}  // namespace gridmul
