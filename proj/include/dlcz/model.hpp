#pragma once

#include <string>
#include <vector>

#include "dlcz/pulses.hpp"

namespace dlcz {

// Physical constants of the ensemble. Optical depths and Rabi frequencies are
// stored in the barred convention (d = 2 d_bar, Omega = 2 Omega_bar); the
// intensity of a resonant probe attenuates as e^{-d}.
struct EnsembleParams {
  double d_w_bar = 0.0;  // write transition optical depth (barred)
  double d_r_bar = 0.0;  // read transition optical depth (barred)
  double gamma_es = 0.0; // rad/s
  double gamma_eg = 0.0; // rad/s
  double gamma_0 = 0.0;  // 1/s in Exponential mode, seconds (time constant) in Gaussian mode
  enum class SpinDecay { Exponential, Gaussian } spin_decay_mode = SpinDecay::Gaussian;
  double delta = 0.0;    // rad/s, write detuning
  double length_L = 0.01;          // m
  double c = 299792458.0;          // m/s

  double g2N() const { return d_r_bar * gamma_eg * c / length_L; }
  void validate() const; // throws std::invalid_argument
  bool operator==(const EnsembleParams&) const = default;
};

struct DetectionChain {
  double eta_fiber = 1.0;
  double eta_filter = 1.0;
  double eta_det = 1.0;
  double dark_rate = 0.0;  // Hz
  double gate_width = 0.0; // s; 0 = default to the read-window span
  void validate() const;
  bool operator==(const DetectionChain&) const = default;
};

// Resolution knobs. `refine` scales every quadrature/grid density at once
// (set 2.0 for grid-doubling convergence checks).
struct GridSpec {
  int write_table_points = 512; // cumulative-table density per segment
  int n_ti = 48;                // write-time quadrature nodes
  int n_s = 32;                 // noise-time quadrature nodes
  int n_u = 96;                 // spatial grid intervals
  int n_v = 16;                 // inner gain-dressing nodes
  int read_points = 257;        // waveform samples
  double refine = 1.0;
  double guard = 0.0;           // extra margin (s) appended to the read window
  bool operator==(const GridSpec&) const = default;
};

struct Scenario {
  EnsembleParams ensemble;
  PulseEnvelope write_pulse;
  PulseEnvelope read_pulse;
  double storage_delay = 0.0;      // read peak-intensity time - write peak time
  DetectionChain detection;
  GridSpec grids;
  double extra_decoherence = 0.0;  // rad/s amplitude decay (read-laser linewidth), 0 = off

  double xi() const { return write_pulse.t_end; } // write window end / read reference time
  double read_start() const { return read_pulse.t_start; }
  double read_end() const { return read_pulse.t_end + grids.guard; }

  // Amplitude decay of the stored excitation at read time t. Gaussian mode:
  // exp(-(t/gamma_0)^2 / 2) with t measured from the write-window origin
  // (gamma_0 is a time constant); exponential mode: exp(-gamma_0 (t - xi))
  // (the pre-xi part lives in the write-stage damping). extra_decoherence
  // adds exp(-extra * (t - xi)) in both modes.
  double retrieval_decay(double t) const;

  void validate() const; // throws std::invalid_argument
  bool operator==(const Scenario&) const = default;
};

// Structured-text (JSON) scenario I/O. Numeric fields carry explicit unit
// strings ("25.1 MHz", "15 ns"); frequency-like quantities in Hz-family units
// are angular frequencies divided by 2 pi (value * 2 pi is stored), with
// {"value": v, "unit": "rad/s"} or "angular": true as literal overrides.
// Bare JSON numbers are accepted only for dimensionless fields.
Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& s); // canonical form; round-trips exactly
std::string scenario_hash(const Scenario& s);      // 16-hex digest of the canonical form

struct Warning {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  enum class Severity { Soft, Hard } severity = Severity::Soft;
  std::string message;
};

// Adiabatic-regime checks; emits one warning per violated condition and never
// blocks execution. Severity is Hard when the violation exceeds 4x.
std::vector<Warning> validate_regime(const Scenario& s, double eps1 = 0.5, double kappa = 3.0);

std::string warnings_to_json(const std::vector<Warning>& w);

} // namespace dlcz
