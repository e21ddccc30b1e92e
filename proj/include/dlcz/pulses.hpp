#pragma once

#include <string>
#include <vector>

namespace dlcz {

// Time-dependent barred Rabi frequency of a drive pulse. All widths are
// stated for the pulse INTENSITY (proportional to omega_bar^2):
//  - Gaussian: fwhm = intensity FWHM; amplitude sigma = fwhm / (2 sqrt(ln 2));
//    support is center +- 2.5 sigma.
//  - RisingExponential: intensity rises as e^{(t-center)/tau_e} and cuts off
//    hard at t = center; support is [center - 7 tau_e, center].
//  - DoubleGaussian: two Gaussian amplitude peaks; peak_rabi_bar is the larger
//    amplitude, second amplitude = amp_ratio relative to the first peak.
//  - Tabulated: piecewise-linear omega_bar samples, zero outside the table.
struct PulseEnvelope {
  enum class Family { Gaussian, RisingExponential, DoubleGaussian, Tabulated };

  Family family = Family::Gaussian;
  double peak_rabi_bar = 0.0; // rad/s, barred convention (Omega = 2 * this)
  double center = 0.0;        // peak-intensity time (cutoff time for RisingExponential)
  double fwhm = 0.0;          // Gaussian / DoubleGaussian first peak
  double tau_e = 0.0;         // RisingExponential 1/e intensity width
  double fwhm2 = 0.0;         // DoubleGaussian second peak
  double separation = 0.0;    // DoubleGaussian: center2 - center1 (> 0)
  double amp_ratio = 1.0;     // DoubleGaussian: amplitude2 / amplitude1
  std::vector<double> table_t, table_omega_bar; // Tabulated samples

  double t_start = 0.0, t_end = 0.0; // support window

  static PulseEnvelope gaussian(double peak_bar, double fwhm, double center);
  static PulseEnvelope rising_exponential(double peak_bar, double tau_e, double cutoff);
  static PulseEnvelope double_gaussian(double peak_bar, double fwhm1, double fwhm2,
                                       double separation, double amp_ratio, double center1);
  static PulseEnvelope tabulated(std::vector<double> t, std::vector<double> omega_bar);

  double omega_bar(double t) const;    // >= 0, exactly 0 outside [t_start, t_end]
  double omega_bar_sq(double t) const;

  // Peak-intensity time used for delay bookkeeping (== center except Tabulated).
  double peak_time() const;
  // Intensity FWHM (closed form where available, else numeric).
  double intensity_fwhm() const;
  // Integral of omega_bar^2 over the support divided by its peak value:
  // the effective duration that sets the total sweep depth.
  double effective_sq_duration() const;
  // Interior discontinuities / knots that integration panels must split at.
  std::vector<double> breakpoints() const;

  void shift(double dt); // translate the pulse in time
  void validate() const; // throws std::invalid_argument
  bool operator==(const PulseEnvelope&) const = default;
};

std::string to_string(PulseEnvelope::Family f);
PulseEnvelope::Family pulse_family_from_string(const std::string& s);

} // namespace dlcz
