#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dlcz/bessel.hpp"
#include "dlcz/kernels.hpp"
#include "dlcz/model.hpp"
#include "dlcz/quadrature.hpp"
#include "oracles.hpp"

using namespace dlcz;
using namespace testing_oracles;

namespace {

constexpr double kTwoPi = 6.283185307179586;

EnsembleParams reference_ensemble() {
  EnsembleParams e;
  e.d_w_bar = 3.75;
  e.d_r_bar = 2.5;
  e.gamma_es = kTwoPi * 3.03e6;
  e.gamma_eg = kTwoPi * 3.03e6;
  e.gamma_0 = 0.0;
  e.spin_decay_mode = EnsembleParams::SpinDecay::Exponential;
  e.delta = -kTwoPi * 40e6;
  e.length_L = 0.01;
  return e;
}

PulseEnvelope reference_write_pulse() {
  // Gaussian write drive whose support starts at t = 0.
  const double fwhm = 15e-9;
  const double sigma = fwhm / (2.0 * std::sqrt(std::log(2.0)));
  return PulseEnvelope::gaussian(kTwoPi * 25.1e6 / 2.0, fwhm, 2.5 * sigma);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("gain-dressing kernels reduce to Bessel evaluations") {
  const double c = 299792458.0;
  for (double dg : {0.0, 1.0e6, 4.0e8, 3.0e9}) {
    for (double dz : {0.0, 2.0e-3, 1.0e-2}) {
      CAPTURE(dg);
      CAPTURE(dz);
      const double q = dg * dz / c;
      const double w = 2.0 * std::sqrt(q);
      CHECK_NEAR_REL(kernel_H(dg, dz, c), bessel_i0(w), 1e-13);
      CHECK_NEAR_ABS(kernel_Gs(dg, dz, c), (dg / c) * bessel_i1_over_half_x(w),
                     1e-13 * (1.0 + dg / c));
      CHECK_NEAR_ABS(kernel_Ge(dg, dz, c), dz * bessel_i1_over_half_x(w),
                     1e-13 * (1.0 + dz));
    }
  }
  // Coincident arguments need no special handling.
  CHECK(kernel_H(0.0, 0.0, c) == 1.0);
  CHECK(kernel_Gs(0.0, 5e-3, c) == 0.0);
  CHECK(kernel_Ge(7e5, 0.0, c) == 0.0);

  // Large radicand exercises the asymptotic Bessel branch (q = 900, w = 60).
  CHECK_NEAR_REL(kernel_H(900.0, 1.0, 1.0), bessel_i0(60.0), 1e-12);

  // The two gain kernels differ only by the measure factor.
  for (double dg : {2.0e7, 9.0e8}) {
    for (double dz : {1.0e-3, 8.0e-3}) {
      CHECK_NEAR_REL(kernel_Ge(dg, dz, c), (c * dz / dg) * kernel_Gs(dg, dz, c),
                     1e-13);
    }
  }
}

TEST_CASE("kernels reject a negative radicand but absorb rounding noise") {
  CHECK_THROWS_AS(kernel_H(-1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(kernel_Gs(1.0, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(kernel_Ge(-1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(kernel_H(std::nan(""), 1.0, 1.0), std::domain_error);
  // A -1e-16 radicand is rounding noise from subtracting near-equal gains.
  CHECK(kernel_H(-1e-16, 1.0, 1.0) == 1.0);
  CHECK(kernel_Gs(-1e-16, 1.0, 1.0) == 0.0);
}

TEST_CASE("write-window medium response") {
  const EnsembleParams e = reference_ensemble();
  const PulseEnvelope wp = reference_write_pulse();
  const GridSpec grids;
  const WriteKernelContext ctx(e, wp, wp.t_end, grids);

  const double tc = wp.peak_time();

  SUBCASE("coupling carries the sign of the detuning") {
    CHECK(ctx.chi(tc) < 0.0);  // red detuning flips the coupling sign
    const double expect =
        std::sqrt(e.d_w_bar * e.gamma_es * e.c / e.length_L) / e.delta *
        wp.omega_bar(tc);
    CHECK_NEAR_REL(ctx.chi(tc), expect, 1e-13);
    for (double t : {0.2 * tc, tc, 1.5 * tc}) {
      CHECK_NEAR_REL(ctx.chi_sq(t), ctx.chi(t) * ctx.chi(t), 1e-14);
    }
    CHECK(ctx.chi(wp.t_end + 1e-9) == 0.0);
  }

  SUBCASE("spin damping composes drive-induced scattering with static decay") {
    // Exponential static decay adds a constant rate.
    EnsembleParams e2 = e;
    e2.gamma_0 = 1000.0;
    const WriteKernelContext cexp(e2, wp, wp.t_end, grids);
    const double drive = e.gamma_es / (e.delta * e.delta) * wp.omega_bar_sq(tc);
    CHECK_NEAR_REL(cexp.gamma_S(tc), 1000.0 + drive, 1e-13);
    CHECK(cexp.gamma_S(wp.t_end + 1e-9) == doctest::Approx(1000.0));

    // Gaussian-mode static decay is handled outside the write stage.
    EnsembleParams e3 = e;
    e3.spin_decay_mode = EnsembleParams::SpinDecay::Gaussian;
    e3.gamma_0 = 53e-6;  // time constant in this mode
    const WriteKernelContext cgau(e3, wp, wp.t_end, grids);
    CHECK_NEAR_REL(cgau.gamma_S(tc), drive, 1e-13);
    CHECK(cgau.gamma_S(wp.t_end + 1e-9) == 0.0);

    // The instantaneous complex damping: imaginary part is the light shift.
    const cplx gs = ctx.Gamma_S(tc);
    CHECK(gs.real() == doctest::Approx(drive));
    CHECK_NEAR_REL(gs.imag(), -wp.omega_bar_sq(tc) / e.delta, 1e-13);
    CHECK(gs.imag() > 0.0);  // red detuning again
  }

  SUBCASE("cumulative damping and gain match direct quadrature") {
    using CplxFn = std::function<cplx(double)>;
    using RealFn = std::function<double(double)>;
    for (double t : {0.35 * wp.t_end, 0.5 * wp.t_end, 0.8 * wp.t_end, wp.t_end}) {
      CAPTURE(t);
      // Split the reference integral at the pulse peak; within each half the
      // integrand is smooth.
      const double mid = std::min(t, tc);
      const cplx direct =
          gl_panels_c(CplxFn([&](double s) { return ctx.Gamma_S(s); }), 0.0, mid, 64) +
          gl_panels_c(CplxFn([&](double s) { return ctx.Gamma_S(s); }), mid, t, 64);
      const cplx table = ctx.Gamma(t);
      CHECK_NEAR_REL(table.real(), direct.real(), 1e-6);
      CHECK_NEAR_REL(table.imag(), direct.imag(), 1e-6);
      CHECK_NEAR_REL(ctx.Gamma_re(t), table.real(), 1e-14);

      const double gdir =
          gl_panels(RealFn([&](double s) { return ctx.chi_sq(s); }), 0.0, mid, 64) +
          gl_panels(RealFn([&](double s) { return ctx.chi_sq(s); }), mid, t, 64);
      CHECK_NEAR_REL(ctx.g(t), gdir, 1e-6);
    }
    CHECK_NEAR_REL(ctx.g_end(), ctx.g(wp.t_end), 1e-12);
    CHECK(ctx.g(0.0) == 0.0);

    // The accumulated gain never decreases.
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double t = wp.t_end * i / 400.0;
      const double v = ctx.g(t);
      CHECK(v >= prev - 1e-12 * ctx.g_end());
      prev = std::max(prev, v);
    }
  }

  SUBCASE("construction rejects an empty window") {
    CHECK_THROWS_AS(WriteKernelContext(e, wp, 0.0, grids), std::invalid_argument);
  }
}

TEST_CASE("read-window sweep bookkeeping") {
  const EnsembleParams e = reference_ensemble();
  const PulseEnvelope wp = reference_write_pulse();
  const double xi = wp.t_end;

  const double fwhm_r = 35e-9;
  const double peak_r = kTwoPi * 23.5e6 / 2.0;
  PulseEnvelope rp = PulseEnvelope::gaussian(peak_r, fwhm_r, xi + 150e-9);
  REQUIRE(rp.t_start > xi);

  const GridSpec grids;
  const ReadKernelContext ctx(e, rp, xi, rp.t_end, grids);

  SUBCASE("normalization constants") {
    CHECK(ctx.g2N() == e.g2N());
    CHECK_NEAR_REL(ctx.g2N(), e.d_r_bar * e.gamma_eg * e.c / e.length_L, 1e-14);
    CHECK(ctx.xi() == xi);
    for (double t : {rp.t_start + 1e-9, rp.peak_time(), rp.t_end - 1e-9}) {
      CHECK_NEAR_REL(ctx.P(t), rp.omega_bar(t) / std::sqrt(ctx.g2N()), 1e-14);
    }
  }

  SUBCASE("accumulated sweep is zero before the pulse and nondecreasing") {
    CHECK(ctx.u_c(xi) == 0.0);
    const double u_end = ctx.u_c(rp.t_end);
    REQUIRE(u_end > 0.0);
    CHECK(std::abs(ctx.u_c(rp.t_start)) <= 1e-10 * u_end);
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double t = xi + (rp.t_end - xi) * i / 400.0;
      const double v = ctx.u_c(t);
      CHECK(v >= prev - 1e-12 * u_end);
      prev = std::max(prev, v);
    }
  }

  SUBCASE("total sweep matches the closed form") {
    // int omega_bar^2 = peak^2 * effective duration; the truncated-Gaussian
    // effective duration is sigma sqrt(pi) erf(2.5).
    const double sigma = fwhm_r / (2.0 * std::sqrt(std::log(2.0)));
    const double esd = sigma * std::sqrt(M_PI) * std::erf(2.5);
    const double expect =
        e.length_L / (e.d_r_bar * e.gamma_eg) * peak_r * peak_r * esd;
    CHECK_NEAR_REL(ctx.u_c(rp.t_end), expect, 1e-9);
    // Evaluation past the table clamps to the total.
    CHECK(ctx.u_c(rp.t_end + 1.0) == ctx.u_c(rp.t_end));
  }

  SUBCASE("smearing width is tied to the sweep") {
    for (double t : {rp.peak_time(), rp.t_end}) {
      CHECK_NEAR_REL(ctx.delta_l(t),
                     std::sqrt(2.0 * e.length_L * ctx.u_c(t) / e.d_r_bar), 1e-13);
    }
  }

  SUBCASE("mid-window sweep matches direct quadrature") {
    using RealFn = std::function<double(double)>;
    const double t = rp.peak_time() + 0.3 * fwhm_r;
    const double direct =
        e.length_L / (e.d_r_bar * e.gamma_eg) *
        (gl_panels(RealFn([&](double s) { return rp.omega_bar_sq(s); }), xi,
                   rp.peak_time(), 64) +
         gl_panels(RealFn([&](double s) { return rp.omega_bar_sq(s); }),
                   rp.peak_time(), t, 64));
    // Between stored nodes the table interpolates (third order), so the
    // tolerance is looser than at the segment ends.
    CHECK_NEAR_REL(ctx.u_c(t), direct, 1e-5);
  }

  SUBCASE("construction rejects inconsistent windows") {
    CHECK_THROWS_AS(ReadKernelContext(e, rp, xi, xi, grids), std::invalid_argument);
    // A read pulse that begins before the reference time is rejected.
    PulseEnvelope early = rp;
    early.shift(-(rp.t_start - xi) - 5e-9);
    CHECK_THROWS_AS(ReadKernelContext(e, early, xi, rp.t_end, grids),
                    std::invalid_argument);
  }
}

}  // TEST_SUITE
