#pragma once

#include "dlcz/model.hpp"
#include "dlcz/quadrature.hpp"

namespace dlcz {

// Gain-dressing kernels of the propagation solution. Arguments are the gain
// difference dg = g(t') - g(t'') [1/s] and the position difference
// dz = z' - z'' [m]; both must be >= 0 up to rounding noise. The common
// radicand q = dg * dz / c is dimensionless; q < -1e-12 raises
// std::domain_error, small negatives clamp to zero.
double kernel_H(double dg, double dz, double c);  // I0(2 sqrt(q))
double kernel_Gs(double dg, double dz, double c); // (dg/c) * 2 I1(w)/w,  w = 2 sqrt(q)
double kernel_Ge(double dg, double dz, double c); // dz * 2 I1(w)/w (== (c dz/dg) Gs)

// Write-window medium response: coupling chi(t), complex spin-wave damping
// Gamma_S(t) = gamma_S(t) + i delta_S(t), and their cumulative integrals from
// the write-grid origin t = 0. In gaussian spin-decay mode the static gamma_0
// is excluded here (it enters as a retrieval-amplitude envelope instead); in
// exponential mode it adds to gamma_S.
class WriteKernelContext {
public:
  WriteKernelContext() = default;
  WriteKernelContext(const EnsembleParams& ensemble, const PulseEnvelope& write_pulse,
                     double t_end, const GridSpec& grids);

  const EnsembleParams& ensemble() const { return ensemble_; }
  const PulseEnvelope& pulse() const { return pulse_; }
  double t_end() const { return t_end_; }

  double chi(double t) const;     // signed: sqrt(d_w_bar gamma_es c / L) * omega_bar / delta
  double chi_sq(double t) const;
  double gamma_S(double t) const; // instantaneous decay rate >= 0
  cplx Gamma_S(double t) const;
  cplx Gamma(double t) const;     // int_0^t Gamma_S ds
  double Gamma_re(double t) const;
  double g(double t) const;       // int_0^t chi^2 ds, nondecreasing
  double g_end() const { return g_end_; }

private:
  EnsembleParams ensemble_;
  PulseEnvelope pulse_;
  double t_end_ = 0.0;
  double chi_norm_ = 0.0;        // sqrt(d_w_bar gamma_es c / L) / delta (signed)
  double gamma0_rate_ = 0.0;     // 1/s contribution of static decay (exponential mode only)
  double gamma_es_over_d2_ = 0.0;
  double inv_delta_ = 0.0;
  double g_end_ = 0.0;
  CumulativeIntegralTable gamma_table_;
  CumulativeIntegralTable g_table_;
};

// Retrieval bookkeeping: the accumulated read sweep turns into a spatial
// offset u_c(t) = (L / (d_r_bar gamma_eg)) int_xi^t omega_bar_R^2 ds and a
// Gaussian smearing width delta_l(t) = sqrt(2 L u_c / d_r_bar).
class ReadKernelContext {
public:
  ReadKernelContext() = default;
  ReadKernelContext(const EnsembleParams& ensemble, const PulseEnvelope& read_pulse, double xi,
                    double t_end, const GridSpec& grids);

  const PulseEnvelope& pulse() const { return pulse_; }
  double xi() const { return xi_; }
  double t_end() const { return t_end_; }

  double u_c(double t) const;     // nondecreasing, 0 before the read support
  double delta_l(double t) const;
  double g2N() const { return g2N_; } // d_r_bar gamma_eg c / L
  double P(double t) const;       // omega_bar_R(t) / sqrt(g2N)

private:
  PulseEnvelope pulse_;
  double xi_ = 0.0, t_end_ = 0.0;
  double g2N_ = 0.0;
  double d_r_bar_ = 0.0, L_ = 0.0;
  CumulativeIntegralTable uc_table_;
};

} // namespace dlcz
