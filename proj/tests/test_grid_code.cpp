#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gridmul/grid_code.hpp"
#include "gridmul/rng.hpp"
#include "test_support.hpp"

using namespace gridmul;
using testsupport::naive_multiply;

TEST_SUITE("grid_code") {
  TEST_CASE("encode_left appends plain and weighted column sums") {
    const GridCodeSpec spec = GridCodeSpec::for_dims({2, 2, 2});

    SUBCASE("identity") {
      const DenseMatrix encoded = encode_left(DenseMatrix::identity(2), spec);
      CHECK(encoded ==
            DenseMatrix::from_rows({{1, 0}, {0, 1}, {1, 1}, {1, 2}}));
    }
    SUBCASE("worked 2x2") {
      const DenseMatrix encoded = encode_left(DenseMatrix::from_rows({{1, 2}, {3, 4}}), spec);
      CHECK(encoded(2, 0) == 4);
      CHECK(encoded(2, 1) == 6);
      CHECK(encoded(3, 0) == 7);
      CHECK(encoded(3, 1) == 10);
    }
    SUBCASE("zero") {
      const DenseMatrix encoded = encode_left(DenseMatrix(2, 2), spec);
      CHECK(encoded == DenseMatrix(4, 2));
    }
    SUBCASE("shape mismatch") {
      CHECK_THROWS_AS(encode_left(DenseMatrix(3, 2), spec), std::invalid_argument);
    }
  }

  TEST_CASE("encode_right appends plain and weighted row sums") {
    const GridCodeSpec spec = GridCodeSpec::for_dims({2, 2, 2});

    SUBCASE("identity") {
      const DenseMatrix encoded = encode_right(DenseMatrix::identity(2), spec);
      CHECK(encoded == DenseMatrix::from_rows({{1, 0, 1, 1}, {0, 1, 1, 2}}));
    }
    SUBCASE("worked 2x2") {
      const DenseMatrix encoded = encode_right(DenseMatrix::from_rows({{1, 2}, {3, 4}}), spec);
      CHECK(encoded(0, 2) == 3);
      CHECK(encoded(1, 2) == 7);
      CHECK(encoded(0, 3) == 5);
      CHECK(encoded(1, 3) == 11);
    }
    SUBCASE("zero") {
      CHECK(encode_right(DenseMatrix(2, 2), spec) == DenseMatrix(2, 4));
    }
  }

  TEST_CASE("coded identity product carries the worked global parities") {
    const GridCodeSpec spec = GridCodeSpec::for_dims({2, 2, 2});
    const DenseMatrix eye = DenseMatrix::identity(2);
    const GridCodedProduct product =
        coded_multiply(encode_left(eye, spec), encode_right(eye, spec), spec);
    const DenseMatrix expected = DenseMatrix::from_rows({{1, 0, 1, 1},
                                                         {0, 1, 1, 2},
                                                         {1, 1, 2, 3},
                                                         {1, 2, 3, 5}});
    CHECK(product.full() == expected);
  }

  TEST_CASE("zero inputs produce an all-zero coded product") {
    const GridCodeSpec spec = GridCodeSpec::for_dims({3, 2, 3});
    const GridCodedProduct product =
        coded_multiply(encode_left(DenseMatrix(3, 2), spec), encode_right(DenseMatrix(2, 3), spec),
                       spec);
    CHECK(product.full() == DenseMatrix(5, 5));
  }

  TEST_CASE("data block equals the plain product") {
    const auto fx = testsupport::make_fixture(4, 4, 4, 31);
    const DenseMatrix plain = multiply(fx.a, fx.b);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(std::abs(fx.product.data(i, j) - plain(i, j)) <= 1e-12);
  }

  TEST_CASE("encoding commutes with multiplication by the generator route") {
    for (std::uint64_t seed = 40; seed < 46; ++seed) {
      Uniform rng(seed);
      const std::size_t n = 3 + rng.index(62);
      const std::size_t k = 1 + rng.index(64);
      const std::size_t m = 3 + rng.index(62);
      const GridCodeSpec spec = GridCodeSpec::for_dims({n, k, m});
      const DenseMatrix a = random_matrix(n, k, derive_seed(seed, 1));
      const DenseMatrix b = random_matrix(k, m, derive_seed(seed, 2));
      const GridCodedProduct product =
          coded_multiply(encode_left(a, spec), encode_right(b, spec), spec);
      // Other association order: G_A (A B) G_B via the naive oracle.
      const DenseMatrix oracle = naive_multiply(
          naive_multiply(testsupport::left_generator(spec), naive_multiply(a, b)),
          testsupport::right_generator(spec));
      for (std::size_t i = 0; i < n + 2; ++i)
        for (std::size_t j = 0; j < m + 2; ++j)
          CHECK(std::abs(product.at(i, j) - oracle(i, j)) <= 1e-9);
    }
  }

  TEST_CASE("fault-free products validate for every seed tested") {
    for (std::uint64_t seed = 50; seed < 58; ++seed) {
      const auto fx = testsupport::make_fixture(8, 6, 9, seed);
      CHECK(validate_grid_structure(fx.product, fx.spec, fx.tau).empty());
    }
  }

  TEST_CASE("per-line residuals of a fault-free product stay within tolerance") {
    const auto fx = testsupport::make_fixture(12, 8, 10, 60);
    const DenseMatrix& full = fx.product.full();
    for (std::size_t i = 0; i < 12; ++i) {
      double plain = 0.0;
      double weighted = 0.0;
      for (std::size_t j = 0; j < 10; ++j) {
        plain += full(i, j);
        weighted += static_cast<double>(j + 1) * full(i, j);
      }
      CHECK(std::abs(plain - full(i, 10)) <= fx.tau);
      CHECK(std::abs(weighted - full(i, 11)) <= fx.tau);
    }
  }

  TEST_CASE("a corrupted data entry trips exactly its four line constraints") {
    auto fx = testsupport::make_fixture(6, 5, 7, 61);
    // 1-based entry (2,3) is 0-based (1,2).
    fx.product.set_data(1, 2, fx.product.data(1, 2) + 5.0);
    const auto violations = validate_grid_structure(fx.product, fx.spec, fx.tau);
    REQUIRE(violations.size() >= 4);
    bool row_plain = false, row_weighted = false, col_plain = false, col_weighted = false;
    for (const auto& violation : violations) {
      if (violation.kind == ConstraintKind::RowPlain && violation.index == 1) row_plain = true;
      if (violation.kind == ConstraintKind::RowWeighted && violation.index == 1)
        row_weighted = true;
      if (violation.kind == ConstraintKind::ColPlain && violation.index == 2) col_plain = true;
      if (violation.kind == ConstraintKind::ColWeighted && violation.index == 2)
        col_weighted = true;
    }
    CHECK(row_plain);
    CHECK(row_weighted);
    CHECK(col_plain);
    CHECK(col_weighted);
  }

  TEST_CASE("a corrupted corner trips only the global constraint touching it") {
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t q = 0; q < 2; ++q) {
        auto fx = testsupport::make_fixture(6, 5, 7, 62);
        fx.product.set(6 + p, 7 + q, fx.product.at(6 + p, 7 + q) + 3.0);
        const auto violations = validate_grid_structure(fx.product, fx.spec, fx.tau);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].kind == ConstraintKind::Global);
        CHECK(violations[0].index == p);
        CHECK(violations[0].index2 == q);
      }
    }
    auto fx = testsupport::make_fixture(6, 5, 7, 62);
    fx.product.set(6, 7, fx.product.at(6, 7) + 3.0);
    const auto violations = validate_grid_structure(fx.product, fx.spec, fx.tau);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].label() == "global[0][0]");
  }

  TEST_CASE("coded binary round trip keeps the trailer") {
    const auto fx = testsupport::make_fixture(5, 4, 6, 63);
    std::stringstream stream;
    write_coded_binary(fx.product, stream);
    const GridCodedProduct reread = read_coded_binary(stream);
    CHECK(reread.full() == fx.product.full());
    CHECK(reread.n() == 5);
    CHECK(reread.m() == 6);
  }
}
