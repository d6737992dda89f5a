#include <doctest.h>

#include <cmath>

#include "gridmul/checksum_baseline.hpp"
#include "gridmul/rng.hpp"
#include "test_support.hpp"

using namespace gridmul;

TEST_SUITE("checksum_baseline") {
  TEST_CASE("identity product carries plain parities and grand total") {
    const ChecksumCodedProduct product =
        checksum_multiply(DenseMatrix::identity(2), DenseMatrix::identity(2));
    CHECK(product.full() == DenseMatrix::from_rows({{1, 0, 1}, {0, 1, 1}, {1, 1, 2}}));
  }

  TEST_CASE("zero inputs give the zero product") {
    const ChecksumCodedProduct product = checksum_multiply(DenseMatrix(3, 2), DenseMatrix(2, 3));
    CHECK(product.full() == DenseMatrix(4, 4));
  }

  TEST_CASE("data block equals the plain product") {
    const DenseMatrix a = random_matrix(8, 8, 130);
    const DenseMatrix b = random_matrix(8, 8, 131);
    const ChecksumCodedProduct product = checksum_multiply(a, b);
    const DenseMatrix plain = testsupport::naive_multiply(a, b);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j)
        CHECK(std::abs(product.data(i, j) - plain(i, j)) <= 1e-12);
  }

  TEST_CASE("single output fault is repaired exactly") {
    const DenseMatrix a = random_matrix(16, 12, 132);
    const DenseMatrix b = random_matrix(12, 16, 133);
    const ChecksumCodedProduct clean = checksum_multiply(a, b);
    ChecksumCodedProduct corrupted = clean;
    corrupted.set_data(5, 9, corrupted.data(5, 9) + 25.0);
    const ChecksumOutcome outcome = checksum_detect_correct(corrupted, 0.1);
    REQUIRE(outcome.kind == OutcomeKind::Corrected);
    const double tau =
        structural_tolerance(Dims{16, 12, 16}, a.max_abs(), b.max_abs());
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j)
        CHECK(std::abs(outcome.corrected->data(i, j) - clean.data(i, j)) <= tau);
  }

  TEST_CASE("single output faults succeed across 1000 seeded trials") {
    const DenseMatrix a = random_matrix(32, 48, 134);
    const DenseMatrix b = random_matrix(48, 32, 135);
    const ChecksumCodedProduct clean = checksum_multiply(a, b);
    const double tau = structural_tolerance(Dims{32, 48, 32}, a.max_abs(), b.max_abs());
    std::size_t exact = 0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
      Uniform rng(derive_seed(136, trial));
      ChecksumCodedProduct corrupted = clean;
      const std::size_t r = rng.index(32);
      const std::size_t c = rng.index(32);
      corrupted.set_data(r, c, corrupted.data(r, c) + rng.signed_range(1.0, 100.0));
      const ChecksumOutcome outcome = checksum_detect_correct(corrupted, 0.1);
      if (outcome.kind != OutcomeKind::Corrected) continue;
      double deviation = 0.0;
      for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < 32; ++j)
          deviation =
              std::max(deviation, std::abs(outcome.corrected->data(i, j) - clean.data(i, j)));
      if (deviation <= tau) ++exact;
    }
    CHECK(exact == 1000);
  }

  TEST_CASE("two output faults in distinct lines are always refused") {
    const DenseMatrix a = random_matrix(32, 48, 137);
    const DenseMatrix b = random_matrix(48, 32, 138);
    const ChecksumCodedProduct clean = checksum_multiply(a, b);
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
      Uniform rng(derive_seed(139, trial));
      ChecksumCodedProduct corrupted = clean;
      const std::size_t r0 = rng.index(32);
      const std::size_t r1 = (r0 + 1 + rng.index(31)) % 32;
      const std::size_t c0 = rng.index(32);
      const std::size_t c1 = (c0 + 1 + rng.index(31)) % 32;
      corrupted.set_data(r0, c0, corrupted.data(r0, c0) + rng.signed_range(1.0, 100.0));
      corrupted.set_data(r1, c1, corrupted.data(r1, c1) + rng.signed_range(1.0, 100.0));
      const ChecksumOutcome outcome = checksum_detect_correct(corrupted, 0.1);
      CHECK(outcome.kind == OutcomeKind::Uncorrectable);
    }
  }

  TEST_CASE("an input-row corruption is detected but beyond this code") {
    const DenseMatrix a = random_matrix(16, 12, 140);
    const DenseMatrix b = random_matrix(12, 16, 141);
    DenseMatrix a_enc = checksum_encode_left(a);
    a_enc(4, 2) += 20.0;  // data symbol; the parity row keeps the clean sums
    const ChecksumCodedProduct product =
        checksum_product_from(a_enc, checksum_encode_right(b));
    const ChecksumOutcome outcome = checksum_detect_correct(product, 0.5);
    CHECK(outcome.kind == OutcomeKind::Uncorrectable);
    CHECK(outcome.flagged_rows.empty());
    CHECK(outcome.flagged_cols.size() > 1);
  }

  TEST_CASE("clean product reports clean") {
    const ChecksumOutcome outcome =
        checksum_detect_correct(checksum_multiply(random_matrix(8, 8, 142),
                                                  random_matrix(8, 8, 143)),
                                0.01);
    CHECK(outcome.kind == OutcomeKind::Clean);
  }
}
