#include "dlcz/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace dlcz {
namespace {

using ojson = nlohmann::ordered_json;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double acc = 0.0;
  for (size_t i = 1; i < t.size(); ++i)
    acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
  return acc;
}

} // namespace

// ---------------------------------------------------------------------------
// FWHM

FwhmResult measure_fwhm(const std::vector<double>& t,
                        const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 3)
    throw std::invalid_argument(
        "waveform needs at least 3 samples with matching time stamps");
  for (size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw std::invalid_argument("sample times must be strictly increasing");

  size_t ipk = 0;
  for (size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[ipk]) ipk = i;
  const double ymax = y[ipk];

  std::vector<double> mag(y.size());
  for (size_t i = 0; i < y.size(); ++i) mag[i] = std::abs(y[i]);
  std::sort(mag.begin(), mag.end());
  const double floor_level = mag[mag.size() / 10];

  if (!(ymax > 0.0) || !(ymax > 10.0 * floor_level))
    throw std::domain_error(
        "no clear peak: the waveform maximum does not stand above 10x the "
        "noise floor");

  const double half = 0.5 * ymax;
  if (y.front() >= half || y.back() >= half)
    throw std::domain_error(
        "the waveform does not fall to half maximum inside the sampled "
        "window");

  std::vector<double> ups, downs;
  bool above = false;
  for (size_t i = 1; i < y.size(); ++i) {
    const bool now = y[i] >= half;
    if (now != above) {
      const double frac = (half - y[i - 1]) / (y[i] - y[i - 1]);
      const double tc = t[i - 1] + frac * (t[i] - t[i - 1]);
      (now ? ups : downs).push_back(tc);
      above = now;
    }
  }
  if (ups.empty() || downs.empty())
    throw std::domain_error(
        "the waveform never crosses half maximum on both sides of the peak");

  FwhmResult r;
  r.t_lo = ups.front();
  r.t_hi = downs.back();
  r.fwhm = r.t_hi - r.t_lo;
  r.peak_time = t[ipk];
  r.peak_value = ymax;
  r.n_lobes = static_cast<int>(ups.size());
  r.multi_peak = r.n_lobes >= 2;
  r.rise_time = r.peak_time - r.t_lo;
  r.fall_time = r.t_hi - r.peak_time;
  return r;
}

const char* shape_class_name(ShapeClass c) {
  switch (c) {
    case ShapeClass::SinglePeak: return "single_peak";
    case ShapeClass::RisingThenCutoff: return "rising_then_cutoff";
    case ShapeClass::DoublePeak: return "double_peak";
  }
  return "unknown";
}

ShapeClass classify_shape(const FwhmResult& r) {
  if (r.multi_peak) return ShapeClass::DoublePeak;
  if (r.fall_time < 0.35 * r.rise_time) return ShapeClass::RisingThenCutoff;
  return ShapeClass::SinglePeak;
}

// ---------------------------------------------------------------------------
// Read-power parameterization

double sweep_depth(const Scenario& s) {
  const PulseEnvelope& p = s.read_pulse;
  const double teff = p.effective_sq_duration();
  return p.peak_rabi_bar * p.peak_rabi_bar * teff /
         (s.ensemble.d_r_bar * s.ensemble.gamma_eg);
}

double power_for_sweep_depth(const Scenario& s, double x) {
  if (!(x > 0.0))
    throw std::invalid_argument("sweep depth must be positive");
  const double teff = s.read_pulse.effective_sq_duration();
  if (!(teff > 0.0))
    throw std::invalid_argument(
        "the read pulse has no support; cannot set a sweep depth");
  return std::sqrt(x * s.ensemble.d_r_bar * s.ensemble.gamma_eg / teff);
}

Scenario with_read_power(const Scenario& s, double peak_rabi_bar) {
  if (!(peak_rabi_bar > 0.0))
    throw std::invalid_argument("read power must be positive");
  Scenario out = s;
  PulseEnvelope& p = out.read_pulse;
  if (p.family == PulseEnvelope::Family::Tabulated) {
    if (!(p.peak_rabi_bar > 0.0))
      throw std::invalid_argument("cannot rescale a zero-amplitude table");
    const double scale = peak_rabi_bar / p.peak_rabi_bar;
    for (double& w : p.table_omega_bar) w *= scale;
  }
  p.peak_rabi_bar = peak_rabi_bar;
  out.validate();
  return out;
}

Scenario with_read_fwhm(const Scenario& s, double intensity_fwhm) {
  if (!(intensity_fwhm > 0.0))
    throw std::invalid_argument("read duration must be positive");
  Scenario out = s;
  const PulseEnvelope& p = s.read_pulse;
  const double start = p.t_start;
  switch (p.family) {
    case PulseEnvelope::Family::Gaussian: {
      // support is center +- 2.5 sigma_amp, sigma_amp = fwhm / (2 sqrt(ln 2))
      const double sigma = intensity_fwhm / (2.0 * std::sqrt(std::log(2.0)));
      out.read_pulse =
          PulseEnvelope::gaussian(p.peak_rabi_bar, intensity_fwhm,
                                  start + 2.5 * sigma);
      break;
    }
    case PulseEnvelope::Family::RisingExponential: {
      // intensity FWHM = tau_e ln 2; support is [cutoff - 7 tau_e, cutoff]
      const double tau = intensity_fwhm / std::log(2.0);
      out.read_pulse = PulseEnvelope::rising_exponential(p.peak_rabi_bar, tau,
                                                         start + 7.0 * tau);
      break;
    }
    default:
      throw std::invalid_argument(
          "duration rescaling is defined for gaussian and rising-exponential "
          "read pulses");
  }
  out.storage_delay = out.read_pulse.peak_time() - out.write_pulse.peak_time();
  out.validate();
  return out;
}

Scenario with_storage_delay(const Scenario& s, double delay) {
  Scenario out = s;
  out.read_pulse.shift(out.write_pulse.peak_time() + delay -
                       out.read_pulse.peak_time());
  out.storage_delay = delay;
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Read-power optimization

PowerOptimum optimize_read_power(const Scenario& s, double peak_lo_bar,
                                 double peak_hi_bar, int coarse_points) {
  if (!(peak_hi_bar > 0.0))
    throw std::invalid_argument("the upper read-power bound must be positive");
  if (!(peak_lo_bar > 0.0)) peak_lo_bar = peak_hi_bar * 1e-3;
  if (!(peak_lo_bar < peak_hi_bar))
    throw std::invalid_argument("empty read-power bracket");
  if (coarse_points < 4) coarse_points = 4;

  PowerOptimum out;
  double best_p = 0.0, best_e = -1.0;
  auto eval = [&](double p) {
    RetrievalSolver solver(with_read_power(s, p));
    const double e = solver.conditional_efficiency();
    if (e > best_e) {
      best_e = e;
      best_p = p;
    }
    return e;
  };

  const double la = std::log(peak_lo_bar), lb = std::log(peak_hi_bar);
  out.curve.reserve(coarse_points);
  for (int i = 0; i < coarse_points; ++i) {
    const double p = std::exp(la + (lb - la) * i / (coarse_points - 1));
    out.curve.push_back({p, eval(p)});
  }

  // Direction changes of the coarse curve, ignoring sub-noise steps.
  {
    const double thr = 1e-4 * std::max(best_e, 0.0);
    int prev = 0, changes = 0;
    for (size_t i = 1; i < out.curve.size(); ++i) {
      const double d = out.curve[i].efficiency - out.curve[i - 1].efficiency;
      const int dir = d > thr ? 1 : (d < -thr ? -1 : 0);
      if (dir == 0) continue;
      if (prev != 0 && dir != prev) {
        ++changes;
        if (prev > 0) ++out.n_interior_maxima;
      }
      prev = dir;
    }
    out.non_unimodal = changes >= 2;
  }

  // Golden-section refinement (in log power) around the best coarse sample.
  {
    int ibest = 0;
    for (size_t i = 1; i < out.curve.size(); ++i)
      if (out.curve[i].efficiency > out.curve[ibest].efficiency)
        ibest = static_cast<int>(i);
    const int il = std::max(0, ibest - 1);
    const int ih = std::min(coarse_points - 1, ibest + 1);
    double a = std::log(out.curve[il].peak_rabi_bar);
    double b = std::log(out.curve[ih].peak_rabi_bar);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = eval(std::exp(c));
    double fd = eval(std::exp(d));
    for (int iter = 0; iter < 40 && (b - a) > 1e-3; ++iter) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = eval(std::exp(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = eval(std::exp(d));
      }
    }
  }

  out.best_power = best_p;
  out.best_efficiency = best_e;
  return out;
}

// ---------------------------------------------------------------------------
// Scans

namespace {

void run_scan_point(const Scenario& s, ScanPoint& pt) {
  RetrievalSolver solver(s);
  const Waveform w = solver.conditional_flux();
  pt.efficiency = w.efficiency;
  pt.efficiency_raw = w.efficiency_raw;
  pt.warnings = w.warnings;
  try {
    const FwhmResult f = measure_fwhm(w.t, w.flux);
    pt.photon_fwhm = f.fwhm;
    pt.multi_peak = f.multi_peak;
  } catch (const std::exception& e) {
    pt.photon_fwhm = 0.0;
    pt.warnings.push_back(std::string("width measurement failed: ") +
                          e.what());
  }
  pt.ok = true;
}

} // namespace

ScanResult scan_duration(const Scenario& base,
                         const std::vector<double>& read_fwhms,
                         bool reoptimize_power) {
  if (read_fwhms.empty())
    throw std::invalid_argument("the duration list must be nonempty");
  ScanResult out;
  out.parameter = "read_fwhm_s";
  out.base_hash = scenario_hash(base);
  const double depth0 = sweep_depth(base);
  for (double fwhm : read_fwhms) {
    ScanPoint pt;
    pt.x = fwhm;
    try {
      Scenario s = with_read_fwhm(base, fwhm);
      if (reoptimize_power) {
        const double hi = power_for_sweep_depth(s, 12.0);
        const double lo = power_for_sweep_depth(s, 0.01);
        const PowerOptimum opt = optimize_read_power(s, lo, hi);
        s = with_read_power(s, opt.best_power);
        pt.peak_rabi_bar = opt.best_power;
      } else {
        const double p = power_for_sweep_depth(s, depth0);
        s = with_read_power(s, p);
        pt.peak_rabi_bar = p;
      }
      run_scan_point(s, pt);
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
      ++out.n_failed;
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

ScanResult scan_delay(const Scenario& base,
                      const std::vector<double>& delays) {
  if (delays.empty())
    throw std::invalid_argument("the delay list must be nonempty");
  ScanResult out;
  out.parameter = "storage_delay_s";
  out.base_hash = scenario_hash(base);
  for (double delay : delays) {
    ScanPoint pt;
    pt.x = delay;
    pt.peak_rabi_bar = base.read_pulse.peak_rabi_bar;
    try {
      run_scan_point(with_storage_delay(base, delay), pt);
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
      ++out.n_failed;
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

// Keep these byte-identical to the files shipped under presets/ (tests
// enforce the equality).
constexpr const char* kPresetFigS1 = R"json({
  "_description": "Short-pulse reference geometry: 15 ns write and 35 ns read pulses, write optical depth 7.5, read optical depth 5, Gaussian memory envelope (53 us time constant), fiber-coupled detection chain.",
  "schema_version": 1,
  "ensemble": {
    "d_w": 7.5,
    "d_r": 5.0,
    "delta": "-40 MHz",
    "spin_decay": {"mode": "gaussian", "gamma_0": "53 us"}
  },
  "write_pulse": {"family": "gaussian", "peak_rabi": "25.1 MHz", "fwhm": "15 ns"},
  "read_pulse": {"family": "gaussian", "peak_rabi": "23.5 MHz", "fwhm": "35 ns"},
  "storage_delay": "150 ns",
  "detection": {"eta_fiber": 0.6, "eta_filter": 0.2, "eta_det": 0.43, "dark_rate": "130 Hz"}
}
)json";

constexpr const char* kPresetFigS2 = R"json({
  "_description": "Long-pulse reference geometry: 15 ns write pulse, 1.27 us read pulse at sweep depth 0.6, write optical depth 4.4, read optical depth 2.9, Gaussian memory envelope.",
  "schema_version": 1,
  "ensemble": {
    "d_w": 4.4,
    "d_r": 2.9,
    "delta": "-40 MHz",
    "spin_decay": {"mode": "gaussian", "gamma_0": "53 us"}
  },
  "write_pulse": {"family": "gaussian", "peak_rabi": "25.1 MHz", "fwhm": "15 ns"},
  "read_pulse": {"family": "gaussian", "peak_rabi_bar": {"value": 3500990.0, "unit": "rad/s"}, "fwhm": "1.27 us"},
  "storage_delay": "2.16 us",
  "detection": {"eta_fiber": 0.6, "eta_filter": 0.2, "eta_det": 0.43, "dark_rate": "130 Hz"}
}
)json";

constexpr const char* kPresetFig2 = R"json({
  "_description": "Duration-scan base: long-pulse optical depths with the short captioned write pulse; the read pulse is rescaled per scan point.",
  "_interpolation_rule": "Per-point pulse parameters between the short- and long-pulse reference geometries are not published. This base keeps the short-geometry write pulse (25.1 MHz, 15 ns), adopts the long-geometry optical depths (4.4 write / 2.9 read), and derives each scan point from the 1.27 us read pulse: the duration is set to the scanned value with the support start held fixed, and the read power is re-optimized per point (or held at sweep depth 0.6 when optimization is disabled).",
  "schema_version": 1,
  "ensemble": {
    "d_w": 4.4,
    "d_r": 2.9,
    "delta": "-40 MHz",
    "spin_decay": {"mode": "gaussian", "gamma_0": "53 us"}
  },
  "write_pulse": {"family": "gaussian", "peak_rabi": "25.1 MHz", "fwhm": "15 ns"},
  "read_pulse": {"family": "gaussian", "peak_rabi_bar": {"value": 3500990.0, "unit": "rad/s"}, "fwhm": "1.27 us"},
  "storage_delay": "2.16 us",
  "detection": {"eta_fiber": 0.6, "eta_filter": 0.2, "eta_det": 0.43, "dark_rate": "130 Hz"}
}
)json";

constexpr const char* kPresetFig3 = R"json({
  "_description": "Decoherence-free duration-scan base for efficiency-plateau studies: identical to the duration-scan base but with the memory decay disabled.",
  "_interpolation_rule": "Per-point pulse parameters between the short- and long-pulse reference geometries are not published. This base keeps the short-geometry write pulse (25.1 MHz, 15 ns), adopts the long-geometry optical depths (4.4 write / 2.9 read), and derives each scan point from the 1.27 us read pulse: the duration is set to the scanned value with the support start held fixed, and the read power is re-optimized per point (or held at sweep depth 0.6 when optimization is disabled).",
  "schema_version": 1,
  "ensemble": {
    "d_w": 4.4,
    "d_r": 2.9,
    "delta": "-40 MHz",
    "spin_decay": {"mode": "exponential", "gamma_0": "0 1/s"}
  },
  "write_pulse": {"family": "gaussian", "peak_rabi": "25.1 MHz", "fwhm": "15 ns"},
  "read_pulse": {"family": "gaussian", "peak_rabi_bar": {"value": 3500990.0, "unit": "rad/s"}, "fwhm": "1.27 us"},
  "storage_delay": "2.16 us",
  "detection": {"eta_fiber": 0.6, "eta_filter": 0.2, "eta_det": 0.43, "dark_rate": "130 Hz"}
}
)json";

constexpr const char* kPresetFig5Rexp = R"json({
  "_description": "Rising-exponential read drive: intensity rises with a 300 ns 1/e width and cuts off hard, at sweep depth 0.6 in the long-pulse geometry.",
  "schema_version": 1,
  "ensemble": {
    "d_w": 4.4,
    "d_r": 2.9,
    "delta": "-40 MHz",
    "spin_decay": {"mode": "gaussian", "gamma_0": "53 us"}
  },
  "write_pulse": {"family": "gaussian", "peak_rabi": "25.1 MHz", "fwhm": "15 ns"},
  "read_pulse": {"family": "rising_exponential", "peak_rabi_bar": {"value": 7433760.0, "unit": "rad/s"}, "tau_e": "300 ns"},
  "storage_delay": "2.5 us",
  "detection": {"eta_fiber": 0.6, "eta_filter": 0.2, "eta_det": 0.43, "dark_rate": "130 Hz"},
  "grids": {"guard": "50 ns"}
}
)json";

constexpr const char* kPresetFig5Timebin = R"json({
  "_description": "Double-peaked (time-bin) read drive: two 250 ns intensity peaks of equal amplitude separated by 900 ns, at sweep depth 0.6 in the long-pulse geometry.",
  "schema_version": 1,
  "ensemble": {
    "d_w": 4.4,
    "d_r": 2.9,
    "delta": "-40 MHz",
    "spin_decay": {"mode": "gaussian", "gamma_0": "53 us"}
  },
  "write_pulse": {"family": "gaussian", "peak_rabi": "25.1 MHz", "fwhm": "15 ns"},
  "read_pulse": {"family": "double_gaussian", "peak_rabi_bar": {"value": 5578750.0, "unit": "rad/s"}, "fwhm": "250 ns", "fwhm2": "250 ns", "separation": "900 ns", "amp_ratio": 1.0},
  "storage_delay": "2.5 us",
  "detection": {"eta_fiber": 0.6, "eta_filter": 0.2, "eta_det": 0.43, "dark_rate": "130 Hz"}
}
)json";

constexpr const char* kPresetOd50 = R"json({
  "_description": "High-optical-depth retrieval benchmark: read optical depth 50 with a weak write pulse (write optical depth 1), deep-saturation 1.27 us read drive, decoherence-free, unit detection chain.",
  "schema_version": 1,
  "ensemble": {
    "d_w": 1.0,
    "d_r": 50.0,
    "delta": "-40 MHz",
    "spin_decay": {"mode": "exponential", "gamma_0": "0 1/s"}
  },
  "write_pulse": {"family": "gaussian", "peak_rabi": "25.1 MHz", "fwhm": "15 ns"},
  "read_pulse": {"family": "gaussian", "peak_rabi_bar": {"value": 53081900.0, "unit": "rad/s"}, "fwhm": "1.27 us"},
  "storage_delay": "2.16 us"
}
)json";

const std::map<std::string, const char*>& preset_table() {
  static const std::map<std::string, const char*> table = {
      {"figS1", kPresetFigS1},       {"figS2", kPresetFigS2},
      {"fig2", kPresetFig2},         {"fig3", kPresetFig3},
      {"fig5-rexp", kPresetFig5Rexp}, {"fig5-timebin", kPresetFig5Timebin},
      {"od50", kPresetOd50},
  };
  return table;
}

} // namespace

std::vector<std::string> preset_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : preset_table()) ids.push_back(id);
  return ids;
}

std::string preset_json(const std::string& id) {
  const auto& table = preset_table();
  auto it = table.find(id);
  if (it == table.end()) {
    std::string known;
    for (const auto& [k, _] : table) known += " " + k;
    throw std::invalid_argument("unknown preset \"" + id + "\"; available:" +
                                known);
  }
  return it->second;
}

Scenario preset_scenario(const std::string& id) {
  return load_scenario(preset_json(id));
}

// ---------------------------------------------------------------------------
// Serialization

std::string waveform_csv(const Waveform& w) {
  std::string out = "time_s,flux_per_s\n";
  for (size_t i = 0; i < w.t.size(); ++i)
    out += fmt_g17(w.t[i]) + "," + fmt_g17(w.flux[i]) + "\n";
  return out;
}

std::string waveform_summary_json(const Waveform& w, const Scenario& s) {
  ojson j;
  j["tool_version"] = kToolVersion;
  j["scenario_hash"] = scenario_hash(s);
  j["efficiency_fiber"] = w.efficiency;
  j["efficiency_raw"] = w.efficiency_raw;
  j["write_emission_probability"] = w.write_prob;
  const double trap = trapezoid(w.t, w.flux);
  j["trapezoid_relative_deviation"] =
      w.efficiency > 0.0 ? std::abs(trap - w.efficiency) / w.efficiency : 0.0;
  try {
    const FwhmResult f = measure_fwhm(w.t, w.flux);
    j["fwhm_s"] = f.fwhm;
    j["peak_time_s"] = f.peak_time;
    j["multi_peak"] = f.multi_peak;
    j["n_lobes"] = f.n_lobes;
    j["shape_class"] = shape_class_name(classify_shape(f));
  } catch (const std::exception& e) {
    j["fwhm_error"] = e.what();
  }
  j["quadrature_error"] = w.quad_error;
  j["low_accuracy"] = w.low_accuracy;
  j["degenerate"] = w.degenerate;
  j["warnings"] = w.warnings;
  return j.dump(2) + "\n";
}

std::string scan_csv(const ScanResult& r) {
  std::string out = r.parameter +
                    ",efficiency_fiber,efficiency_raw,photon_fwhm_s,"
                    "peak_rabi_bar_rad_s,multi_peak,ok,error\n";
  for (const ScanPoint& p : r.points) {
    out += fmt_g17(p.x) + "," + fmt_g17(p.efficiency) + "," +
           fmt_g17(p.efficiency_raw) + "," + fmt_g17(p.photon_fwhm) + "," +
           fmt_g17(p.peak_rabi_bar) + "," + (p.multi_peak ? "1" : "0") + "," +
           (p.ok ? "1" : "0") + "," + csv_quote(p.error) + "\n";
  }
  return out;
}

std::string scan_json(const ScanResult& r) {
  ojson j;
  j["tool_version"] = r.tool_version;
  j["parameter"] = r.parameter;
  j["base_scenario_hash"] = r.base_hash;
  j["n_points"] = r.points.size();
  j["n_failed"] = r.n_failed;
  ojson pts = ojson::array();
  for (const ScanPoint& p : r.points) {
    ojson q;
    q["x"] = p.x;
    q["ok"] = p.ok;
    if (!p.ok) q["error"] = p.error;
    q["efficiency_fiber"] = p.efficiency;
    q["efficiency_raw"] = p.efficiency_raw;
    q["photon_fwhm_s"] = p.photon_fwhm;
    q["peak_rabi_bar_rad_s"] = p.peak_rabi_bar;
    q["multi_peak"] = p.multi_peak;
    q["warnings"] = p.warnings;
    pts.push_back(std::move(q));
  }
  j["points"] = std::move(pts);
  return j.dump(2) + "\n";
}

std::string power_curve_csv(const PowerOptimum& p) {
  std::string out = "peak_rabi_bar_rad_s,efficiency_fiber\n";
  for (const PowerScanPoint& q : p.curve)
    out += fmt_g17(q.peak_rabi_bar) + "," + fmt_g17(q.efficiency) + "\n";
  return out;
}

std::string power_curve_json(const PowerOptimum& p, const Scenario& s) {
  ojson j;
  j["tool_version"] = kToolVersion;
  j["scenario_hash"] = scenario_hash(s);
  j["best_peak_rabi_bar_rad_s"] = p.best_power;
  j["best_efficiency_fiber"] = p.best_efficiency;
  j["non_unimodal"] = p.non_unimodal;
  j["n_interior_maxima"] = p.n_interior_maxima;
  j["n_curve_points"] = p.curve.size();
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Figure-style reference runs

namespace {

struct Band {
  double value = 0.0, lo = 0.0, hi = 0.0;
  bool pass() const { return value >= lo && value <= hi; }
};

void add_band(ojson& j, bool& all_pass, const std::string& name,
              const Band& b) {
  ojson e;
  e["value"] = b.value;
  e["band"] = {b.lo, b.hi};
  e["pass"] = b.pass();
  j[name] = std::move(e);
  all_pass = all_pass && b.pass();
}

void add_check(ojson& j, bool& all_pass, const std::string& name, bool ok,
               const std::string& detail) {
  ojson e;
  e["pass"] = ok;
  e["detail"] = detail;
  j[name] = std::move(e);
  all_pass = all_pass && ok;
}

FigureResult figure_delay_curve() {
  // Memory-lifetime benchmark: retrieval efficiency vs storage delay with the
  // Gaussian envelope; checks the 1/e point and the deep-tail suppression.
  FigureResult out;
  out.id = "figS1";
  const Scenario base = preset_scenario("figS1");
  const double gamma0 = base.ensemble.gamma_0;
  const double d0 = base.storage_delay;
  std::vector<double> delays = {d0,           10e-6,        20e-6,
                                30e-6,        40e-6,        d0 + gamma0,
                                70e-6,        90e-6,        120e-6,
                                d0 + 3.0 * gamma0};
  const ScanResult scan = scan_delay(base, delays);
  out.csv = scan_csv(scan);

  ojson j;
  bool all = true;
  j["tool_version"] = kToolVersion;
  j["id"] = out.id;
  j["base_scenario_hash"] = scan.base_hash;
  const double e0 = scan.points.front().efficiency;
  const double e1 = scan.points[5].efficiency;  // d0 + gamma0
  const double e3 = scan.points.back().efficiency;
  add_band(j, all, "zero_delay_efficiency_fiber", {e0, 0.15, 0.30});
  const double ratio = e0 > 0.0 ? e1 / e0 : 0.0;
  const double inv_e = std::exp(-1.0);
  add_band(j, all, "lifetime_delay_ratio",
           {ratio, inv_e * 0.98, inv_e * 1.02});
  add_band(j, all, "triple_lifetime_ratio",
           {e0 > 0.0 ? e3 / e0 : 1.0, 0.0, 1e-3});
  add_check(j, all, "scan_complete", scan.n_failed == 0,
            scan.n_failed == 0 ? "all points computed"
                               : "some scan points failed");
  out.all_bands_pass = all;
  out.summary_json = j.dump(2) + "\n";
  return out;
}

FigureResult figure_power_curve() {
  // Efficiency vs read power for the long (1.27 us) read pulse: the curve
  // saturates monotonically and the optimizer lands on the plateau.
  FigureResult out;
  out.id = "figS2";
  const Scenario base = preset_scenario("figS2");
  const double lo = power_for_sweep_depth(base, 0.01);
  const double hi = power_for_sweep_depth(base, 12.0);
  const PowerOptimum opt = optimize_read_power(base, lo, hi);
  out.csv = power_curve_csv(opt);

  ojson j;
  bool all = true;
  j["tool_version"] = kToolVersion;
  j["id"] = out.id;
  j["base_scenario_hash"] = scenario_hash(base);
  j["best_peak_rabi_bar_rad_s"] = opt.best_power;
  j["best_efficiency_fiber"] = opt.best_efficiency;
  add_check(j, all, "monotone_saturating", !opt.non_unimodal,
            opt.non_unimodal ? "interior oscillation detected"
                             : "no interior oscillation");
  const double plateau = opt.curve.back().efficiency;
  add_band(j, all, "optimum_vs_plateau",
           {plateau > 0.0 ? opt.best_efficiency / plateau : 0.0, 0.999, 1.05});
  out.all_bands_pass = all;
  out.summary_json = j.dump(2) + "\n";
  return out;
}

FigureResult figure_duration_scan(const char* id, bool decoherence_free) {
  FigureResult out;
  out.id = id;
  const Scenario base = preset_scenario(id);
  const std::vector<double> durations =
      decoherence_free
          ? std::vector<double>{0.1e-6, 0.3e-6, 1e-6, 3e-6, 10e-6}
          : std::vector<double>{0.3e-6, 1.27e-6, 5e-6};
  // The plateau study optimizes power per point (that is the claim under
  // test); the shape study holds the sweep depth fixed so the photon follows
  // the drive envelope rather than compressing under deep saturation.
  const ScanResult scan = scan_duration(base, durations, decoherence_free);
  out.csv = scan_csv(scan);

  ojson j;
  bool all = true;
  j["tool_version"] = kToolVersion;
  j["id"] = out.id;
  j["base_scenario_hash"] = scan.base_hash;
  if (decoherence_free) {
    // Efficiency plateau: power-optimized efficiency flat across durations.
    double emin = 1e300, emax = 0.0;
    bool complete = scan.n_failed == 0;
    for (const ScanPoint& p : scan.points) {
      if (!p.ok) continue;
      emin = std::min(emin, p.efficiency);
      emax = std::max(emax, p.efficiency);
    }
    add_check(j, all, "scan_complete", complete,
              complete ? "all points computed" : "some scan points failed");
    add_band(j, all, "efficiency_max_over_min",
             {emin > 0.0 ? emax / emin : 1e300, 1.0, 1.10});
  } else {
    // Shape tracking: photon width follows pulse width.
    bool monotone = true;
    double prev = 0.0;
    ojson ratios = ojson::array();
    bool ratios_ok = true;
    for (const ScanPoint& p : scan.points) {
      if (!p.ok) {
        ratios_ok = false;
        continue;
      }
      if (p.photon_fwhm < prev) monotone = false;
      prev = p.photon_fwhm;
      const double ratio = p.photon_fwhm / p.x;
      ratios.push_back(ratio);
      ratios_ok = ratios_ok && ratio >= 0.8 && ratio <= 1.3;
    }
    j["fwhm_ratio_values"] = std::move(ratios);
    add_check(j, all, "fwhm_ratio_in_band", ratios_ok,
              "photon FWHM / pulse FWHM within [0.8, 1.3] at every point");
    add_check(j, all, "photon_fwhm_monotone", monotone,
              "photon FWHM nondecreasing with pulse FWHM");
  }
  out.all_bands_pass = all;
  out.summary_json = j.dump(2) + "\n";
  return out;
}

FigureResult figure_shaped_pulse(const char* id) {
  FigureResult out;
  out.id = id;
  const Scenario base = preset_scenario(id);
  RetrievalSolver solver(base);
  const Waveform w = solver.conditional_flux();
  out.csv = waveform_csv(w);

  // Equal-duration Gaussian comparison at the same sweep depth.
  const double duration = base.read_pulse.intensity_fwhm();
  const double depth = sweep_depth(base);
  Scenario gauss = base;
  {
    const double sigma = duration / (2.0 * std::sqrt(std::log(2.0)));
    gauss.read_pulse = PulseEnvelope::gaussian(
        1.0, duration, base.read_pulse.t_start + 2.5 * sigma);
    gauss.storage_delay =
        gauss.read_pulse.peak_time() - gauss.write_pulse.peak_time();
    gauss = with_read_power(gauss, power_for_sweep_depth(gauss, depth));
  }
  RetrievalSolver gsolver(gauss);
  const double eta_gauss = gsolver.conditional_efficiency();

  ojson j;
  bool all = true;
  j["tool_version"] = kToolVersion;
  j["id"] = out.id;
  j["base_scenario_hash"] = scenario_hash(base);
  j["efficiency_fiber"] = w.efficiency;
  j["gaussian_reference_efficiency_fiber"] = eta_gauss;
  add_band(j, all, "efficiency_vs_gaussian_reference",
           {eta_gauss > 0.0 ? w.efficiency / eta_gauss : 0.0, 0.7, 1.3});
  try {
    const FwhmResult f = measure_fwhm(w.t, w.flux);
    const ShapeClass cls = classify_shape(f);
    j["photon_fwhm_s"] = f.fwhm;
    j["n_lobes"] = f.n_lobes;
    j["shape_class"] = shape_class_name(cls);
    const bool timebin = std::string(id) == "fig5-timebin";
    add_check(j, all, "shape_class_detected",
              cls == (timebin ? ShapeClass::DoublePeak
                              : ShapeClass::RisingThenCutoff),
              timebin ? "expected a double-peaked waveform"
                      : "expected a rising-then-cutoff waveform");
  } catch (const std::exception& e) {
    add_check(j, all, "shape_class_detected", false,
              std::string("width measurement failed: ") + e.what());
  }
  out.all_bands_pass = all;
  out.summary_json = j.dump(2) + "\n";
  return out;
}

} // namespace

FigureResult reproduce_figure(const std::string& id) {
  if (id == "figS1") return figure_delay_curve();
  if (id == "figS2") return figure_power_curve();
  if (id == "fig2") return figure_duration_scan("fig2", false);
  if (id == "fig3") return figure_duration_scan("fig3", true);
  if (id == "fig5-rexp" || id == "fig5-timebin")
    return figure_shaped_pulse(id.c_str());
  throw std::invalid_argument(
      "unknown figure id \"" + id +
      "\"; available: fig2 fig3 fig5-rexp fig5-timebin figS1 figS2");
}

} // namespace dlcz
