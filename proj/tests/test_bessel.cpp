#include <cmath>
#include <stdexcept>

#include "dlcz/bessel.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace dlcz;
using namespace testing_oracles;

TEST_SUITE("bessel") {

TEST_CASE("frozen reference values") {
  // High-precision constants fixed before implementation.
  CHECK_NEAR_REL(bessel_i0(1.0), 1.2660658777520083356, 1e-14);
  CHECK_NEAR_REL(bessel_i1(1.0), 0.56515910399248502721, 1e-14);
  CHECK_NEAR_REL(bessel_i0(0.5), 1.0634833707413235193, 1e-14);
  CHECK_NEAR_REL(bessel_i1(2.5), 2.5167162452886984415, 1e-14);
  CHECK_NEAR_REL(bessel_i0(30.0), 781672297823.97748972, 1e-13);
  CHECK_NEAR_REL(bessel_i0_scaled(30.0), 0.073145946482237293929, 1e-13);
  CHECK_NEAR_REL(bessel_i0_scaled(1e6), 0.00039894233026924577878, 1e-12);
}

TEST_CASE("power-series oracle across the branch switch") {
  // The implementation switches evaluation strategy at x = 15; the oracle is
  // a single all-positive long-double series everywhere.
  const double xs[] = {1e-8, 1e-3, 0.1, 0.5,  1.0,  2.5,  5.0, 10.0,
                       14.0, 14.9, 15.0, 15.1, 16.0, 20.0, 25.0, 30.0};
  for (double x : xs) {
    CAPTURE(x);
    CHECK_NEAR_REL(bessel_i0(x), static_cast<double>(bessel_i0_series(x)), 1e-12);
    CHECK_NEAR_REL(bessel_i1(x), static_cast<double>(bessel_i1_series(x)), 1e-12);
  }
}

TEST_CASE("scaled variants agree with the unscaled values") {
  for (double x : {0.0, 0.3, 1.0, 7.5, 15.5, 30.0, 120.0}) {
    CAPTURE(x);
    CHECK_NEAR_REL(bessel_i0_scaled(x), bessel_i0(x) * std::exp(-x), 3e-13);
    CHECK_NEAR_REL(bessel_i1_scaled(x), bessel_i1(x) * std::exp(-x), 3e-13);
  }
  // Scaled values stay finite and decay like 1/sqrt(2 pi x) at large x.
  const double huge[] = {1e3, 1e4, 1e5, 1e6};
  double prev = bessel_i0_scaled(500.0);
  for (double x : huge) {
    const double v = bessel_i0_scaled(x);
    CHECK(std::isfinite(v));
    CHECK(v < prev);
    CHECK_NEAR_REL(v, 1.0 / std::sqrt(2.0 * M_PI * x) * (1.0 + 1.0 / (8.0 * x)),
                   1e-6);
    prev = v;
  }
}

TEST_CASE("entire function 2 I1(x)/x") {
  CHECK(bessel_i1_over_half_x(0.0) == 1.0);
  // Near zero: 1 + x^2/8 + O(x^4).
  CHECK_NEAR_REL(bessel_i1_over_half_x(1e-8), 1.0, 1e-15);
  CHECK_NEAR_ABS(bessel_i1_over_half_x(1e-3), 1.0 + 1e-6 / 8.0, 1e-12);
  for (double x : {0.5, 2.0, 10.0, 40.0}) {
    CAPTURE(x);
    CHECK_NEAR_REL(bessel_i1_over_half_x(x), 2.0 * bessel_i1(x) / x, 1e-13);
  }
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(bessel_i0(-1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_i1(-1e-300), std::domain_error);
  CHECK_THROWS_AS(bessel_i0_scaled(-2.0), std::domain_error);
  CHECK_THROWS_AS(bessel_i1_scaled(-2.0), std::domain_error);
  CHECK_THROWS_AS(bessel_i1_over_half_x(-0.5), std::domain_error);
  const double nan = std::nan("");
  CHECK_THROWS_AS(bessel_i0(nan), std::domain_error);
  CHECK_THROWS_AS(bessel_i1(nan), std::domain_error);
}

}  // TEST_SUITE
