#include "dlcz/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dlcz/quadrature.hpp"

namespace dlcz {

namespace {
constexpr double kSupportSigmas = 2.5; // Gaussian support half-width in amplitude sigmas
constexpr double kRexpSupportTaus = 7.0;

double gauss_sigma_amp(double intensity_fwhm) {
  return intensity_fwhm / (2.0 * std::sqrt(std::log(2.0)));
}
} // namespace

PulseEnvelope PulseEnvelope::gaussian(double peak_bar, double fwhm, double center) {
  PulseEnvelope p;
  p.family = Family::Gaussian;
  p.peak_rabi_bar = peak_bar;
  p.fwhm = fwhm;
  p.center = center;
  const double s = gauss_sigma_amp(fwhm);
  p.t_start = center - kSupportSigmas * s;
  p.t_end = center + kSupportSigmas * s;
  p.validate();
  return p;
}

PulseEnvelope PulseEnvelope::rising_exponential(double peak_bar, double tau_e, double cutoff) {
  PulseEnvelope p;
  p.family = Family::RisingExponential;
  p.peak_rabi_bar = peak_bar;
  p.tau_e = tau_e;
  p.center = cutoff;
  p.t_start = cutoff - kRexpSupportTaus * tau_e;
  p.t_end = cutoff;
  p.validate();
  return p;
}

PulseEnvelope PulseEnvelope::double_gaussian(double peak_bar, double fwhm1, double fwhm2,
                                             double separation, double amp_ratio,
                                             double center1) {
  PulseEnvelope p;
  p.family = Family::DoubleGaussian;
  p.peak_rabi_bar = peak_bar;
  p.fwhm = fwhm1;
  p.fwhm2 = fwhm2;
  p.separation = separation;
  p.amp_ratio = amp_ratio;
  p.center = center1;
  const double s1 = gauss_sigma_amp(fwhm1), s2 = gauss_sigma_amp(fwhm2);
  p.t_start = center1 - kSupportSigmas * s1;
  p.t_end = center1 + separation + kSupportSigmas * s2;
  p.validate();
  return p;
}

PulseEnvelope PulseEnvelope::tabulated(std::vector<double> t, std::vector<double> omega_bar) {
  PulseEnvelope p;
  p.family = Family::Tabulated;
  p.table_t = std::move(t);
  p.table_omega_bar = std::move(omega_bar);
  if (p.table_t.empty()) throw std::invalid_argument("tabulated pulse: empty table");
  p.t_start = p.table_t.front();
  p.t_end = p.table_t.back();
  p.peak_rabi_bar = *std::max_element(p.table_omega_bar.begin(), p.table_omega_bar.end());
  p.validate();
  return p;
}

void PulseEnvelope::validate() const {
  if (!(peak_rabi_bar >= 0.0)) throw std::invalid_argument("pulse: peak Rabi must be >= 0");
  switch (family) {
    case Family::Gaussian:
      if (!(fwhm > 0.0)) throw std::invalid_argument("gaussian pulse: FWHM must be > 0");
      break;
    case Family::RisingExponential:
      if (!(tau_e > 0.0)) throw std::invalid_argument("rising-exponential pulse: tau_e must be > 0");
      break;
    case Family::DoubleGaussian:
      if (!(fwhm > 0.0) || !(fwhm2 > 0.0))
        throw std::invalid_argument("double-gaussian pulse: both FWHMs must be > 0");
      if (!(separation > 0.0))
        throw std::invalid_argument("double-gaussian pulse: separation must be > 0");
      if (!(amp_ratio >= 0.0))
        throw std::invalid_argument("double-gaussian pulse: amplitude ratio must be >= 0");
      break;
    case Family::Tabulated: {
      if (table_t.size() != table_omega_bar.size() || table_t.size() < 2)
        throw std::invalid_argument("tabulated pulse: need >= 2 matching samples");
      for (size_t i = 0; i + 1 < table_t.size(); ++i)
        if (!(table_t[i] < table_t[i + 1]))
          throw std::invalid_argument("tabulated pulse: times must be strictly increasing");
      for (double v : table_omega_bar)
        if (!(v >= 0.0)) throw std::invalid_argument("tabulated pulse: negative amplitude");
      break;
    }
  }
  if (!(t_end > t_start)) throw std::invalid_argument("pulse: empty support window");
}

double PulseEnvelope::omega_bar(double t) const {
  if (t < t_start || t > t_end) return 0.0;
  switch (family) {
    case Family::Gaussian: {
      const double s = gauss_sigma_amp(fwhm);
      const double u = (t - center) / s;
      return peak_rabi_bar * std::exp(-0.5 * u * u);
    }
    case Family::RisingExponential:
      return peak_rabi_bar * std::exp((t - center) / (2.0 * tau_e));
    case Family::DoubleGaussian: {
      const double s1 = gauss_sigma_amp(fwhm), s2 = gauss_sigma_amp(fwhm2);
      const double a1 = peak_rabi_bar / std::max(1.0, amp_ratio);
      const double a2 = a1 * amp_ratio;
      const double u1 = (t - center) / s1;
      const double u2 = (t - center - separation) / s2;
      return a1 * std::exp(-0.5 * u1 * u1) + a2 * std::exp(-0.5 * u2 * u2);
    }
    case Family::Tabulated: {
      const auto it = std::upper_bound(table_t.begin(), table_t.end(), t);
      const size_t i = static_cast<size_t>(
          std::clamp<long>(it - table_t.begin() - 1, 0, static_cast<long>(table_t.size()) - 2));
      const double w = (t - table_t[i]) / (table_t[i + 1] - table_t[i]);
      return table_omega_bar[i] * (1.0 - w) + table_omega_bar[i + 1] * w;
    }
  }
  return 0.0;
}

double PulseEnvelope::omega_bar_sq(double t) const {
  const double v = omega_bar(t);
  return v * v;
}

double PulseEnvelope::peak_time() const {
  if (family != Family::Tabulated) {
    if (family == Family::DoubleGaussian && amp_ratio > 1.0) return center + separation;
    return center;
  }
  const auto it = std::max_element(table_omega_bar.begin(), table_omega_bar.end());
  return table_t[static_cast<size_t>(it - table_omega_bar.begin())];
}

double PulseEnvelope::intensity_fwhm() const {
  switch (family) {
    case Family::Gaussian:
      return fwhm;
    case Family::RisingExponential:
      return tau_e * std::log(2.0);
    default: {
      // Numeric: outermost half-max crossings of omega_bar^2 on a dense grid.
      const int n = 4096;
      const double h = (t_end - t_start) / n;
      double peak = 0.0;
      for (int i = 0; i <= n; ++i) peak = std::max(peak, omega_bar_sq(t_start + i * h));
      const double half = 0.5 * peak;
      double lo = t_start, hi = t_end;
      for (int i = 0; i <= n; ++i) {
        if (omega_bar_sq(t_start + i * h) >= half) {
          lo = t_start + i * h;
          break;
        }
      }
      for (int i = n; i >= 0; --i) {
        if (omega_bar_sq(t_start + i * h) >= half) {
          hi = t_start + i * h;
          break;
        }
      }
      return hi - lo;
    }
  }
}

double PulseEnvelope::effective_sq_duration() const {
  if (peak_rabi_bar <= 0.0) return 0.0;
  const double total = gl_panels([this](double t) { return omega_bar_sq(t); }, t_start, t_end, 32);
  return total / (peak_rabi_bar * peak_rabi_bar);
}

std::vector<double> PulseEnvelope::breakpoints() const {
  std::vector<double> b{t_start, t_end};
  if (family == Family::Tabulated)
    b.insert(b.end(), table_t.begin(), table_t.end());
  if (family == Family::DoubleGaussian) {
    b.push_back(center);
    b.push_back(center + separation);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

void PulseEnvelope::shift(double dt) {
  center += dt;
  t_start += dt;
  t_end += dt;
  for (double& t : table_t) t += dt;
}

std::string to_string(PulseEnvelope::Family f) {
  switch (f) {
    case PulseEnvelope::Family::Gaussian: return "gaussian";
    case PulseEnvelope::Family::RisingExponential: return "rising_exponential";
    case PulseEnvelope::Family::DoubleGaussian: return "double_gaussian";
    case PulseEnvelope::Family::Tabulated: return "tabulated";
  }
  return "?";
}

PulseEnvelope::Family pulse_family_from_string(const std::string& s) {
  if (s == "gaussian") return PulseEnvelope::Family::Gaussian;
  if (s == "rising_exponential") return PulseEnvelope::Family::RisingExponential;
  if (s == "double_gaussian") return PulseEnvelope::Family::DoubleGaussian;
  if (s == "tabulated") return PulseEnvelope::Family::Tabulated;
  throw std::invalid_argument("unknown pulse family: " + s);
}

} // namespace dlcz
