#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gridmul/corrector.hpp"
#include "gridmul/matrix.hpp"

namespace gridmul {

/// Single-checksum baseline code: one plain parity row and one plain parity
/// column around the n x m data block, with the grand total in the corner.
class ChecksumCodedProduct {
 public:
  ChecksumCodedProduct(DenseMatrix full, std::size_t n, std::size_t m);

  const DenseMatrix& full() const { return full_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

  double data(std::size_t i, std::size_t j) const { return full_(i, j); }
  void set_data(std::size_t i, std::size_t j, double value) { full_(i, j) = value; }

  DenseMatrix data_block() const;

 private:
  DenseMatrix full_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
};

/// (n+1) x k and k x (m+1) encoded factors.
DenseMatrix checksum_encode_left(const DenseMatrix& a);
DenseMatrix checksum_encode_right(const DenseMatrix& b);

ChecksumCodedProduct checksum_product_from(const DenseMatrix& a_enc, const DenseMatrix& b_enc);

/// Full baseline pipeline on clean inputs.
ChecksumCodedProduct checksum_multiply(const DenseMatrix& a, const DenseMatrix& b);

struct ChecksumOutcome {
  OutcomeKind kind = OutcomeKind::Clean;
  std::optional<ChecksumCodedProduct> corrected;
  std::vector<RepairEntry> repairs;
  std::string reason;
  std::vector<std::size_t> flagged_rows;
  std::vector<std::size_t> flagged_cols;
};

/// Single-error detect and correct: exactly one flagged row and one flagged
/// column pin the faulty entry, which is repaired by subtracting the row
/// residual. Anything else that trips a check is beyond this code's ability
/// and is reported Uncorrectable with the flag sets attached.
ChecksumOutcome checksum_detect_correct(const ChecksumCodedProduct& product, double delta);

}  // namespace gridmul
