#include "dlcz/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dlcz/bessel.hpp"

namespace dlcz {
namespace {

constexpr double kRadicandTol = 1e-12;

double checked_radicand(double dg, double dz, double c, const char* who) {
  if (!std::isfinite(dg) || !std::isfinite(dz) || !(c > 0.0))
    throw std::domain_error(std::string(who) + ": non-finite argument");
  const double q = dg * dz / c;
  if (q < -kRadicandTol)
    throw std::domain_error(std::string(who) +
                            ": negative radicand (time or position ordering violated)");
  return std::max(q, 0.0);
}

// Breakpoints for the cumulative tables: the pulse's own knots clipped to
// [t0, t1] so every Simpson segment sees a smooth integrand.
std::vector<double> clipped_breakpoints(const PulseEnvelope& p, double t0, double t1) {
  std::vector<double> bps;
  for (double b : p.breakpoints())
    if (b > t0 && b < t1) bps.push_back(b);
  return bps;
}

} // namespace

double kernel_H(double dg, double dz, double c) {
  const double q = checked_radicand(dg, dz, c, "kernel_H");
  return bessel_i0(2.0 * std::sqrt(q));
}

double kernel_Gs(double dg, double dz, double c) {
  const double q = checked_radicand(dg, dz, c, "kernel_Gs");
  return (std::max(dg, 0.0) / c) * bessel_i1_over_half_x(2.0 * std::sqrt(q));
}

double kernel_Ge(double dg, double dz, double c) {
  const double q = checked_radicand(dg, dz, c, "kernel_Ge");
  return std::max(dz, 0.0) * bessel_i1_over_half_x(2.0 * std::sqrt(q));
}

WriteKernelContext::WriteKernelContext(const EnsembleParams& ensemble,
                                       const PulseEnvelope& write_pulse, double t_end,
                                       const GridSpec& grids)
    : ensemble_(ensemble), pulse_(write_pulse), t_end_(t_end) {
  ensemble_.validate();
  pulse_.validate();
  if (!(t_end_ > 0.0)) throw std::invalid_argument("write kernel: t_end must be > 0");

  chi_norm_ = std::sqrt(ensemble_.d_w_bar * ensemble_.gamma_es * ensemble_.c /
                        ensemble_.length_L) /
              ensemble_.delta;
  gamma0_rate_ = ensemble_.spin_decay_mode == EnsembleParams::SpinDecay::Exponential
                     ? ensemble_.gamma_0
                     : 0.0;
  gamma_es_over_d2_ = ensemble_.gamma_es / (ensemble_.delta * ensemble_.delta);
  inv_delta_ = 1.0 / ensemble_.delta;

  const std::vector<double> bps = clipped_breakpoints(pulse_, 0.0, t_end_);
  const int n = std::max(32, static_cast<int>(std::lround(grids.write_table_points * grids.refine)));
  gamma_table_ = CumulativeIntegralTable([this](double t) { return Gamma_S(t); }, 0.0, t_end_,
                                         bps, n);
  g_table_ = CumulativeIntegralTable([this](double t) { return cplx(chi_sq(t), 0.0); }, 0.0,
                                     t_end_, bps, n);
  g_end_ = g_table_.total().real();

  // The driving integrands are nonnegative, so both cumulatives must come out
  // nondecreasing; losing that would silently corrupt every kernel radicand.
  double prev_g = 0.0, prev_re = 0.0;
  const double slack = 1e-12 * std::max(g_end_, 1.0) ;
  for (int i = 0; i <= 512; ++i) {
    const double t = t_end_ * i / 512.0;
    const double gv = g(t), rv = Gamma_re(t);
    if (gv < prev_g - slack || rv < prev_re - 1e-12 * std::max(prev_re, 1.0))
      throw std::logic_error("write kernel: cumulative tables lost monotonicity");
    prev_g = std::max(prev_g, gv);
    prev_re = std::max(prev_re, rv);
  }
}

double WriteKernelContext::chi(double t) const { return chi_norm_ * pulse_.omega_bar(t); }

double WriteKernelContext::chi_sq(double t) const {
  const double v = chi(t);
  return v * v;
}

double WriteKernelContext::gamma_S(double t) const {
  return gamma0_rate_ + gamma_es_over_d2_ * pulse_.omega_bar_sq(t);
}

cplx WriteKernelContext::Gamma_S(double t) const {
  return {gamma_S(t), -pulse_.omega_bar_sq(t) * inv_delta_};
}

cplx WriteKernelContext::Gamma(double t) const { return gamma_table_.eval(t); }

double WriteKernelContext::Gamma_re(double t) const { return gamma_table_.eval(t).real(); }

double WriteKernelContext::g(double t) const { return g_table_.eval_real(t); }

ReadKernelContext::ReadKernelContext(const EnsembleParams& ensemble,
                                     const PulseEnvelope& read_pulse, double xi, double t_end,
                                     const GridSpec& grids)
    : pulse_(read_pulse), xi_(xi), t_end_(t_end) {
  ensemble.validate();
  pulse_.validate();
  if (!(t_end_ > xi_)) throw std::invalid_argument("read kernel: empty read window");
  if (pulse_.t_start < xi_ - 1e-9 * (pulse_.t_end - pulse_.t_start))
    throw std::invalid_argument("read kernel: read pulse begins before xi");

  g2N_ = ensemble.g2N();
  d_r_bar_ = ensemble.d_r_bar;
  L_ = ensemble.length_L;

  const double uc_norm = L_ / (d_r_bar_ * ensemble.gamma_eg);
  const std::vector<double> bps = clipped_breakpoints(pulse_, xi_, t_end_);
  const int n = std::max(32, static_cast<int>(std::lround(grids.write_table_points * grids.refine)));
  uc_table_ = CumulativeIntegralTable(
      [this, uc_norm](double t) { return cplx(uc_norm * pulse_.omega_bar_sq(t), 0.0); }, xi_,
      t_end_, bps, n);

  double prev = 0.0;
  for (int i = 0; i <= 512; ++i) {
    const double t = xi_ + (t_end_ - xi_) * i / 512.0;
    const double v = u_c(t);
    if (v < prev - 1e-12 * std::max(prev, 1e-300))
      throw std::logic_error("read kernel: u_c table lost monotonicity");
    prev = std::max(prev, v);
  }
}

double ReadKernelContext::u_c(double t) const { return std::max(uc_table_.eval_real(t), 0.0); }

double ReadKernelContext::delta_l(double t) const {
  return std::sqrt(2.0 * L_ * u_c(t) / d_r_bar_);
}

double ReadKernelContext::P(double t) const {
  return pulse_.omega_bar(t) / std::sqrt(g2N_);
}

} // namespace dlcz
