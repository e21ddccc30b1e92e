#pragma once

// Waveform analysis, parameter scans, read-power optimization, bundled
// reference scenarios, and stable CSV/JSON result serialization.

#include <string>
#include <vector>

#include "dlcz/model.hpp"
#include "dlcz/solver.hpp"

namespace dlcz {

inline constexpr const char* kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Waveform shape measurement

struct FwhmResult {
  double fwhm = 0.0;        // t_hi - t_lo
  double t_lo = 0.0;        // outermost half-maximum up-crossing
  double t_hi = 0.0;        // outermost half-maximum down-crossing
  double peak_time = 0.0;
  double peak_value = 0.0;
  int n_lobes = 1;          // contiguous stretches above half maximum
  bool multi_peak = false;  // n_lobes >= 2; width spans the outermost crossings
  double rise_time = 0.0;   // peak_time - t_lo
  double fall_time = 0.0;   // t_hi - peak_time
};

// Full width at half of the global maximum with linear-interpolated
// crossings. Requires a peak standing above 10x the flux-noise floor
// (estimated as the 10th percentile of |y|) and a crossing on each side;
// otherwise throws std::domain_error. Multi-lobed waveforms report the
// outermost crossings and set multi_peak.
FwhmResult measure_fwhm(const std::vector<double>& t,
                        const std::vector<double>& y);

enum class ShapeClass { SinglePeak, RisingThenCutoff, DoublePeak };
const char* shape_class_name(ShapeClass c);

// DoublePeak when several half-maximum lobes exist; RisingThenCutoff when the
// fall from peak to half maximum is under 0.35x the rise; else SinglePeak.
ShapeClass classify_shape(const FwhmResult& r);

// ---------------------------------------------------------------------------
// Read-power parameterization
//
// The retrieval drive is naturally measured by the dimensionless sweep depth
// x = integral of the squared barred read Rabi / (d_r_bar * gamma_eg): the
// fraction of the gain line swept through the ensemble by the pulse.

double sweep_depth(const Scenario& s);

// Peak barred Rabi frequency giving sweep depth x for the scenario's read
// pulse shape. Throws when the pulse has no support or x <= 0.
double power_for_sweep_depth(const Scenario& s, double x);

// Scenario copies with one knob turned; all other fields preserved.
Scenario with_read_power(const Scenario& s, double peak_rabi_bar);
// Rebuilds the read pulse at the requested intensity FWHM, holding the
// support start fixed (the pulse extends forward, as a longer drive would).
// Defined for gaussian and rising-exponential read pulses.
Scenario with_read_fwhm(const Scenario& s, double intensity_fwhm);
// Shifts the read pulse so its peak sits `delay` after the write-pulse peak.
Scenario with_storage_delay(const Scenario& s, double delay);

// ---------------------------------------------------------------------------
// Read-power optimization

struct PowerScanPoint {
  double peak_rabi_bar = 0.0;
  double efficiency = 0.0;  // fiber-coupled conditional retrieval efficiency
};

struct PowerOptimum {
  std::vector<PowerScanPoint> curve;  // coarse log-spaced scan, ascending
  double best_power = 0.0;
  double best_efficiency = 0.0;
  bool non_unimodal = false;  // several significant interior maxima
  int n_interior_maxima = 0;
};

// Coarse log-spaced scan (default 24 points) over [peak_lo_bar, peak_hi_bar]
// followed by golden-section refinement of the best bracket. The returned
// best efficiency is never below any coarse sample. peak_hi_bar must be
// positive; a nonpositive peak_lo_bar defaults to peak_hi_bar / 1000.
PowerOptimum optimize_read_power(const Scenario& s, double peak_lo_bar,
                                 double peak_hi_bar, int coarse_points = 24);

// ---------------------------------------------------------------------------
// Parameter scans

struct ScanPoint {
  double x = 0.0;  // scanned value, in the scan's parameter unit
  bool ok = false;
  std::string error;  // set when ok is false; scan continues past failures
  double efficiency = 0.0;      // fiber-coupled
  double efficiency_raw = 0.0;  // before fiber coupling
  double photon_fwhm = 0.0;     // s; 0 when unmeasurable
  double peak_rabi_bar = 0.0;   // read power used at this point
  bool multi_peak = false;
  std::vector<std::string> warnings;
};

struct ScanResult {
  std::string parameter;  // "read_fwhm_s", "storage_delay_s", ...
  std::vector<ScanPoint> points;
  int n_failed = 0;
  std::string base_hash;     // scenario digest of the scan base
  std::string tool_version = kToolVersion;
};

// One point per requested intensity FWHM. With reoptimize_power the read
// power is re-optimized per point (bounds from sweep depths 0.01..12);
// otherwise it is rescaled to hold the base scenario's sweep depth.
ScanResult scan_duration(const Scenario& base,
                         const std::vector<double>& read_fwhms,
                         bool reoptimize_power);

// One point per write-peak-to-read-peak delay; read power untouched.
ScanResult scan_delay(const Scenario& base, const std::vector<double>& delays);

// ---------------------------------------------------------------------------
// Bundled reference scenarios

std::vector<std::string> preset_ids();
// Canonical JSON text of a bundled scenario (identical to the copy shipped
// under presets/). Throws std::invalid_argument for unknown ids.
std::string preset_json(const std::string& id);
Scenario preset_scenario(const std::string& id);

// ---------------------------------------------------------------------------
// Result serialization (byte-stable for a fixed tool version)

std::string waveform_csv(const Waveform& w);
std::string waveform_summary_json(const Waveform& w, const Scenario& s);
std::string scan_csv(const ScanResult& r);
std::string scan_json(const ScanResult& r);
std::string power_curve_csv(const PowerOptimum& p);
std::string power_curve_json(const PowerOptimum& p, const Scenario& s);

// ---------------------------------------------------------------------------
// Figure-style reference runs

struct FigureResult {
  std::string id;
  std::string csv;           // the figure's primary curve
  std::string summary_json;  // scalar results and acceptance-band checks
  bool all_bands_pass = true;
};

// id is one of: fig2, fig3, fig5-rexp, fig5-timebin, figS1, figS2.
FigureResult reproduce_figure(const std::string& id);

} // namespace dlcz
