#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gridmul/corrector.hpp"
#include "gridmul/rng.hpp"
#include "test_support.hpp"

using namespace gridmul;
using testsupport::Cell;

namespace {

CorrectionOutcome detect_and_correct(const GridCodedProduct& product, const GridCodeSpec& spec,
                                     double delta) {
  return correct(product, compute_syndrome(product, spec, delta), spec);
}

}  // namespace

TEST_SUITE("corrector") {
  TEST_CASE("single data fault round trips exactly") {
    const auto fx = testsupport::make_fixture(8, 8, 8, 90);
    const auto corrupted = testsupport::with_pattern(fx.product, {{4, 2, 7.0}});
    const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, 0.1);
    REQUIRE(outcome.kind == OutcomeKind::Corrected);
    REQUIRE(outcome.repairs.size() == 1);
    CHECK(outcome.repairs[0].row == 4);
    CHECK(outcome.repairs[0].col == 2);
    CHECK(std::abs(outcome.repairs[0].estimated_error - 7.0) <= fx.tau);
    CHECK(testsupport::max_data_deviation(*outcome.corrected, fx.product) <= fx.tau);
  }

  TEST_CASE("two faults sharing a column solve the 2x2 system") {
    const auto fx = testsupport::make_fixture(8, 8, 8, 91);
    const auto corrupted = testsupport::with_pattern(fx.product, {{3, 5, 2.0}, {6, 5, -4.0}});
    const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, 0.1);
    REQUIRE(outcome.kind == OutcomeKind::Corrected);
    CHECK(testsupport::max_data_deviation(*outcome.corrected, fx.product) <= fx.tau);
  }

  TEST_CASE("the rank-one kernel pattern stays invisible and uncorrected") {
    const auto fx = testsupport::make_fixture(8, 8, 8, 92);
    const double u[3] = {1, -2, 1};
    std::vector<Cell> cells;
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t a = 0; a < 3; ++a) cells.push_back({2 + b, a, 2.0 * u[b] * u[a]});
    const auto corrupted = testsupport::with_pattern(fx.product, cells);
    const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, 0.5);
    CHECK(outcome.kind == OutcomeKind::Clean);
    CHECK(outcome.repairs.empty());
  }

  TEST_CASE("a plain-cancelling two-row pattern is absorbed as parity damage") {
    // Only the weighted column checks trip, with zero plain residuals; the
    // decoder cannot tell this from damaged weighted parity symbols and
    // rewrites the parities, leaving the data block corrupted. The harness
    // counts such trials as failures.
    const auto fx = testsupport::make_fixture(8, 8, 8, 192);
    const auto corrupted = testsupport::with_pattern(
        fx.product, {{2, 0, 2}, {2, 1, -4}, {2, 2, 2}, {3, 0, -2}, {3, 1, 4}, {3, 2, -2}});
    const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, 0.5);
    REQUIRE(outcome.kind == OutcomeKind::ParityRepair);
    CHECK(testsupport::max_data_deviation(*outcome.corrected, corrupted) == 0.0);
    CHECK(testsupport::max_data_deviation(*outcome.corrected, fx.product) > 1.0);
  }

  TEST_CASE("repair_single_row subtracts per-column residuals") {
    const auto fx = testsupport::make_fixture(10, 6, 10, 93);

    SUBCASE("one fault") {
      auto corrupted = testsupport::with_pattern(fx.product, {{0, 0, 5.0}});
      const Syndrome s = compute_syndrome(corrupted, fx.spec, 0.1);
      const auto repairs = repair_single_row(corrupted, 0, s.flagged_cols, s);
      REQUIRE(repairs.size() == 1);
      CHECK(std::abs(repairs[0].new_value - (repairs[0].old_value - 5.0)) <= fx.tau);
      CHECK(testsupport::max_data_deviation(corrupted, fx.product) <= fx.tau);
    }
    SUBCASE("two faults in one row") {
      auto corrupted = testsupport::with_pattern(fx.product, {{1, 3, 1.0}, {1, 8, -3.0}});
      const Syndrome s = compute_syndrome(corrupted, fx.spec, 0.1);
      REQUIRE(s.flagged_cols == std::vector<std::size_t>{3, 8});
      repair_single_row(corrupted, 1, s.flagged_cols, s);
      CHECK(testsupport::max_data_deviation(corrupted, fx.product) <= fx.tau);
    }
    SUBCASE("empty flagged set is a no-op") {
      auto copy = fx.product;
      const Syndrome s = compute_syndrome(copy, fx.spec, 0.1);
      CHECK(repair_single_row(copy, 0, s.flagged_cols, s).empty());
      CHECK(copy.full() == fx.product.full());
    }
  }

  TEST_CASE("repair_two_rows solves the worked system") {
    // Faults +2 at (1,1) and +3 at (2,1), 1-based: column residuals are 5
    // and 8, and [1 1; 1 2] e = (5, 8) gives e = (2, 3).
    const auto fx = testsupport::make_fixture(6, 6, 6, 94);
    auto corrupted = testsupport::with_pattern(fx.product, {{0, 0, 2.0}, {1, 0, 3.0}});
    const Syndrome s = compute_syndrome(corrupted, fx.spec, 0.1);
    CHECK(std::abs(s.col_plain[0] - 5.0) <= fx.tau);
    CHECK(std::abs(s.col_weighted[0] - 8.0) <= fx.tau);
    const auto repairs = repair_two_rows(corrupted, 0, 1, {0}, s);
    REQUIRE(repairs.size() == 2);
    CHECK(std::abs(repairs[0].estimated_error - 2.0) <= fx.tau);
    CHECK(std::abs(repairs[1].estimated_error - 3.0) <= fx.tau);
    CHECK(testsupport::max_data_deviation(corrupted, fx.product) <= fx.tau);
  }

  TEST_CASE("repair_two_rows returns a zero estimate for the untouched row") {
    const auto fx = testsupport::make_fixture(6, 6, 6, 95);
    auto corrupted = testsupport::with_pattern(fx.product, {{2, 4, 6.0}});
    const Syndrome s = compute_syndrome(corrupted, fx.spec, 0.1);
    const auto repairs = repair_two_rows(corrupted, 2, 5, {4}, s);
    REQUIRE(repairs.size() == 2);
    CHECK(std::abs(repairs[0].estimated_error - 6.0) <= fx.tau);
    CHECK(std::abs(repairs[1].estimated_error) <= fx.tau);
    CHECK(testsupport::max_data_deviation(corrupted, fx.product) <= fx.tau);
  }

  TEST_CASE("full two-by-two intersection round trips") {
    const auto fx = testsupport::make_fixture(8, 8, 8, 96);
    const auto corrupted = testsupport::with_pattern(
        fx.product, {{1, 2, 2.5}, {1, 6, -1.5}, {5, 2, 4.0}, {5, 6, 3.0}});
    const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, 0.1);
    REQUIRE(outcome.kind == OutcomeKind::Corrected);
    CHECK(testsupport::max_data_deviation(*outcome.corrected, fx.product) <= fx.tau);
    // Repairs stay inside the flagged intersections.
    for (const RepairEntry& repair : outcome.repairs) {
      CHECK((repair.row == 1 || repair.row == 5));
      CHECK((repair.col == 2 || repair.col == 6));
    }
  }

  TEST_CASE("repair_parity rebuilds damaged parity symbols") {
    SUBCASE("column parity symbol") {
      auto fx = testsupport::make_fixture(8, 6, 8, 97);
      fx.product.set(8, 4, fx.product.at(8, 4) + 9.0);
      const CorrectionOutcome outcome = detect_and_correct(fx.product, fx.spec, 0.1);
      REQUIRE(outcome.kind == OutcomeKind::ParityRepair);
      CHECK(validate_grid_structure(*outcome.corrected, fx.spec, fx.tau).empty());
    }
    SUBCASE("row parity symbol") {
      auto fx = testsupport::make_fixture(8, 6, 8, 97);
      fx.product.set(2, 8, fx.product.at(2, 8) - 4.0);
      const CorrectionOutcome outcome = detect_and_correct(fx.product, fx.spec, 0.1);
      REQUIRE(outcome.kind == OutcomeKind::ParityRepair);
      CHECK(validate_grid_structure(*outcome.corrected, fx.spec, fx.tau).empty());
    }
    SUBCASE("every corner") {
      for (std::size_t p = 0; p < 2; ++p) {
        for (std::size_t q = 0; q < 2; ++q) {
          auto fx = testsupport::make_fixture(8, 6, 8, 98);
          fx.product.set(8 + p, 8 + q, fx.product.at(8 + p, 8 + q) + 9.0);
          const CorrectionOutcome outcome = detect_and_correct(fx.product, fx.spec, 0.1);
          REQUIRE(outcome.kind == OutcomeKind::ParityRepair);
          CHECK(validate_grid_structure(*outcome.corrected, fx.spec, fx.tau).empty());
        }
      }
    }
    SUBCASE("vacuous") {
      auto fx = testsupport::make_fixture(8, 6, 8, 99);
      auto copy = fx.product;
      const Syndrome s = compute_syndrome(copy, fx.spec, 0.1);
      CHECK(repair_parity(copy, s, fx.spec).empty());
    }
  }

  TEST_CASE("corrections are idempotent") {
    const auto fx = testsupport::make_fixture(8, 8, 8, 100);
    const auto corrupted = testsupport::with_pattern(fx.product, {{2, 3, 5.0}, {6, 3, -2.0}});
    const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, 0.1);
    REQUIRE(outcome.kind == OutcomeKind::Corrected);
    const CorrectionOutcome again = detect_and_correct(*outcome.corrected, fx.spec, 0.1);
    CHECK(again.kind == OutcomeKind::Clean);
  }

  TEST_CASE("patterns covering three rows and columns are refused without mutation") {
    const auto fx = testsupport::make_fixture(12, 8, 12, 101);
    std::vector<Cell> cells;
    Uniform rng(102);
    for (std::size_t r : {1, 5, 9})
      for (std::size_t c : {2, 6, 10})
        cells.push_back({r, c, rng.signed_range(1.0, 50.0)});
    const auto corrupted = testsupport::with_pattern(fx.product, cells);
    const DenseMatrix before = corrupted.full();
    const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, 0.1);
    CHECK(outcome.kind == OutcomeKind::Uncorrectable);
    CHECK_FALSE(outcome.corrected.has_value());
    CHECK(corrupted.full() == before);
  }

  TEST_CASE("random patterns within two lines per side always round trip") {
    const double delta = 0.1;
    const auto fx = testsupport::make_fixture(32, 64, 32, 103);
    std::size_t corrected = 0;
    const std::size_t trials = 300;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
      Uniform rng(derive_seed(104, trial));
      const std::size_t s = 1 + rng.index(2);
      const std::size_t t = 1 + rng.index(2);
      std::vector<std::size_t> rows{rng.index(32)};
      if (s == 2) rows.push_back((rows[0] + 1 + rng.index(31)) % 32);
      std::vector<std::size_t> cols{rng.index(32)};
      if (t == 2) cols.push_back((cols[0] + 1 + rng.index(31)) % 32);
      std::vector<Cell> cells;
      for (std::size_t r : rows)
        for (std::size_t c : cols)
          cells.push_back({r, c, rng.signed_range(10.0 * delta, 100.0)});
      const auto corrupted = testsupport::with_pattern(fx.product, cells);
      const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, delta);
      REQUIRE(outcome.kind == OutcomeKind::Corrected);
      if (testsupport::max_data_deviation(*outcome.corrected, fx.product) <= fx.tau) ++corrected;
    }
    CHECK(corrected == trials);
  }

  TEST_CASE("row-confined patterns with many columns round trip") {
    const double delta = 0.1;
    const auto fx = testsupport::make_fixture(32, 64, 32, 105);
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      Uniform rng(derive_seed(106, trial));
      const std::size_t s = 1 + rng.index(2);
      const std::size_t t = 1 + rng.index(32);
      std::vector<std::size_t> rows{rng.index(32)};
      if (s == 2) rows.push_back((rows[0] + 1 + rng.index(31)) % 32);
      std::vector<std::size_t> cols;
      while (cols.size() < t) {
        const std::size_t c = rng.index(32);
        if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
      }
      std::vector<Cell> cells;
      for (std::size_t r : rows)
        for (std::size_t c : cols)
          cells.push_back({r, c, rng.signed_range(10.0 * delta, 100.0)});
      const auto corrupted = testsupport::with_pattern(fx.product, cells);
      const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, delta);
      REQUIRE(outcome.kind == OutcomeKind::Corrected);
      CHECK(testsupport::max_data_deviation(*outcome.corrected, fx.product) <= fx.tau);
    }
  }

  TEST_CASE("exhaustive small sweep with reduced magnitudes matches the oracle") {
    const double delta = 0.25;
    const auto fx = testsupport::make_fixture(4, 4, 4, 107);
    std::size_t cases = 0;
    for (std::size_t rbits = 1; rbits < 16; ++rbits) {
      if (__builtin_popcount(static_cast<unsigned>(rbits)) > 2) continue;
      for (std::size_t cbits = 1; cbits < 16; ++cbits) {
        if (__builtin_popcount(static_cast<unsigned>(cbits)) > 2) continue;
        std::vector<std::pair<std::size_t, std::size_t>> grid;
        for (std::size_t r = 0; r < 4; ++r) {
          if (!(rbits & (1u << r))) continue;
          for (std::size_t c = 0; c < 4; ++c) {
            if (cbits & (1u << c)) grid.emplace_back(r, c);
          }
        }
        const std::size_t subsets = 1u << grid.size();
        for (std::size_t mask = 1; mask < subsets; ++mask) {
          std::vector<std::size_t> chosen;
          for (std::size_t g = 0; g < grid.size(); ++g) {
            if (mask & (1u << g)) chosen.push_back(g);
          }
          for (std::size_t signs = 0; signs < (1u << chosen.size()); ++signs) {
            std::vector<Cell> cells;
            for (std::size_t idx = 0; idx < chosen.size(); ++idx) {
              const auto [r, c] = grid[chosen[idx]];
              cells.push_back({r, c, (signs & (1u << idx)) ? 2.0 : -2.0});
            }
            const auto corrupted = testsupport::with_pattern(fx.product, cells);
            const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, delta);
            REQUIRE(outcome.kind == OutcomeKind::Corrected);
            REQUIRE(testsupport::max_data_deviation(*outcome.corrected, fx.product) <= fx.tau);
            ++cases;
          }
        }
      }
    }
    CHECK(cases > 1000);
  }

  TEST_CASE("repair log serializes to csv") {
    const auto fx = testsupport::make_fixture(6, 5, 6, 108);
    const auto corrupted = testsupport::with_pattern(fx.product, {{2, 2, 3.0}});
    const CorrectionOutcome outcome = detect_and_correct(corrupted, fx.spec, 0.1);
    REQUIRE(outcome.kind == OutcomeKind::Corrected);
    std::stringstream stream;
    write_repair_log_csv(outcome.repairs, stream);
    std::string header;
    std::getline(stream, header);
    CHECK(header == "row,col,old,new,e_hat");
    std::string line;
    std::getline(stream, line);
    CHECK(line.rfind("2,2,", 0) == 0);
  }
}
