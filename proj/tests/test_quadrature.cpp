#include <cmath>
#include <functional>
#include <stdexcept>

#include "doctest.h"
#include "dlcz/quadrature.hpp"
#include "oracles.hpp"

using namespace dlcz;
using namespace testing_oracles;

namespace {
using RealFn = std::function<double(double)>;
using CplxFn = std::function<cplx(double)>;
}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("16-point rule integrates polynomials up to degree 31 exactly") {
  // int_0^1 x^n = 1/(n+1).
  for (int n : {0, 1, 7, 19, 31}) {
    CAPTURE(n);
    const double v = gl16(RealFn([n](double x) { return std::pow(x, n); }), 0.0, 1.0);
    CHECK_NEAR_REL(v, 1.0 / (n + 1), 5e-15);
  }
  // Degree 41 is well beyond the rule's exactness; a small but genuine
  // truncation error must appear (far above the ~1e-18 roundoff floor).
  const double v41 = gl16(RealFn([](double x) { return std::pow(x, 41); }), 0.0, 1.0);
  CHECK(std::abs(v41 - 1.0 / 42.0) > 1e-14);
  CHECK(std::abs(v41 - 1.0 / 42.0) < 1e-12);
}

TEST_CASE("composite panels on smooth and oscillatory integrands") {
  const double s = gl_panels(RealFn([](double x) { return std::sin(x); }), 0.0,
                             M_PI, 4);
  CHECK_NEAR_REL(s, 2.0, 1e-14);
  const double e = gl_panels(RealFn([](double x) { return std::exp(x); }), 0.0,
                             1.0, 2);
  CHECK_NEAR_REL(e, std::exp(1.0) - 1.0, 1e-14);
  const cplx osc = gl_panels_c(
      CplxFn([](double x) { return std::exp(cplx(0.0, x)); }), 0.0,
      2.0 * M_PI, 8);
  CHECK_NEAR_ABS(std::abs(osc), 0.0, 1e-13);
}

TEST_CASE("node tables match the panel evaluation") {
  std::vector<double> xs, ws;
  gl_nodes(-1.0, 3.0, 3, xs, ws);
  REQUIRE(xs.size() == 48);
  REQUIRE(ws.size() == 48);
  double wsum = 0.0, acc = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) CHECK(xs[i] > xs[i - 1]);
    CHECK(xs[i] >= -1.0);
    CHECK(xs[i] <= 3.0);
    wsum += ws[i];
    acc += ws[i] * std::cos(xs[i]);
  }
  CHECK_NEAR_REL(wsum, 4.0, 1e-14);
  const double direct =
      gl_panels(RealFn([](double x) { return std::cos(x); }), -1.0, 3.0, 3);
  CHECK_NEAR_REL(acc, direct, 1e-14);
}

TEST_CASE("adaptive integration converges and reports failure honestly") {
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  const QuadResult smooth = integrate_1d(
      RealFn([](double x) { return std::exp(-x * x); }), 0.0, 2.0, spec);
  CHECK(smooth.converged);
  // erf(2) * sqrt(pi)/2.
  CHECK_NEAR_REL(smooth.value.real(), 0.88208139076242088889, 1e-12);
  CHECK(smooth.error_estimate <= 1e-10);

  // A square-root kink starves panel doubling when the level budget is tiny;
  // the result must be flagged, not silently returned.
  QuadratureSpec tight;
  tight.rel_tol = 1e-14;
  tight.max_levels = 2;
  const QuadResult kink = integrate_1d(
      RealFn([](double x) { return std::sqrt(std::abs(x - 1.0 / 3.0)); }), 0.0,
      1.0, tight);
  CHECK_FALSE(kink.converged);
}

TEST_CASE("nested rectangular integrals") {
  const QuadResult two = integrate_nested(
      [](double x, double y) { return cplx(x + y, 0.0); }, 0.0, 1.0, 0.0, 1.0);
  CHECK(two.converged);
  CHECK_NEAR_REL(two.value.real(), 1.0, 1e-12);

  const QuadResult three = integrate_nested(
      [](double x, double y, double z) { return cplx(x * y * z, 0.0); }, 0.0,
      1.0, 0.0, 1.0, 0.0, 1.0);
  CHECK(three.converged);
  CHECK_NEAR_REL(three.value.real(), 0.125, 1e-12);
}

TEST_CASE("cumulative table tracks the antiderivative") {
  const CumulativeIntegralTable table(
      CplxFn([](double t) { return cplx(std::cos(t), 0.0); }), 0.0, M_PI,
      {1.0}, 256);
  // Interpolation between stored nodes is third-order accurate, so with 256
  // nodes the mid-interval error sits in the 1e-6 range.
  for (int i = 0; i <= 20; ++i) {
    const double t = M_PI * i / 20.0;
    CAPTURE(t);
    CHECK_NEAR_ABS(table.eval_real(t), std::sin(t), 2e-5);
  }
  CHECK_NEAR_ABS(table.total().real(), 0.0, 1e-9);
  // Clamped outside its domain.
  CHECK(table.eval_real(-5.0) == table.eval_real(0.0));
  CHECK(table.eval_real(50.0) == table.eval_real(M_PI));
}

TEST_CASE("cumulative table of a nonnegative integrand stays monotone") {
  // PCHIP interpolation must not overshoot between nodes.
  const CumulativeIntegralTable table(
      CplxFn([](double t) {
        const double d = (t - 0.4) / 0.05;
        return cplx(std::exp(-0.5 * d * d), 0.0);
      }),
      0.0, 1.0, {}, 64);
  double prev = table.eval_real(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double t = i / 1000.0;
    const double v = table.eval_real(t);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("time grids") {
  TimeGrid g{0.0, 2.0, 17, TimeGrid::Spacing::Uniform};
  const std::vector<double> u = g.samples();
  REQUIRE(u.size() == 17);
  CHECK(u.front() == 0.0);
  CHECK(u.back() == 2.0);
  for (size_t i = 1; i < u.size(); ++i) CHECK(u[i] > u[i - 1]);

  g.spacing = TimeGrid::Spacing::Chebyshev;
  const std::vector<double> ch = g.samples();
  REQUIRE(ch.size() == 17);
  CHECK(ch.front() == doctest::Approx(0.0));
  CHECK(ch.back() == doctest::Approx(2.0));
  for (size_t i = 1; i < ch.size(); ++i) CHECK(ch[i] > ch[i - 1]);
  // Chebyshev points cluster toward the ends.
  CHECK(ch[1] - ch[0] < u[1] - u[0]);

  TimeGrid bad{1.0, 1.0, 20};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  TimeGrid toofew{0.0, 1.0, 1};
  CHECK_THROWS_AS(toofew.validate(), std::invalid_argument);
}

TEST_CASE("cubic spline interpolates smooth data") {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    x.push_back(3.0 * i / 40.0);
    y.push_back(std::sin(x.back()));
  }
  const CubicSpline sp(x, y);
  // The natural boundary condition costs accuracy near the ends, so the
  // tight bound applies only to the interior.
  for (int i = 0; i <= 100; ++i) {
    const double t = 3.0 * i / 100.0;
    const double tol = (t >= 0.5 && t <= 2.5) ? 2e-6 : 1e-4;
    CHECK_NEAR_ABS(sp.eval(t), std::sin(t), tol);
  }
  // Clamped evaluation outside the grid.
  CHECK(sp.eval(-1.0) == sp.eval(0.0));
  CHECK(sp.eval(99.0) == sp.eval(3.0));
}

}  // TEST_SUITE
