#include "dlcz/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dlcz {
namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config field '" + path + "': " + what);
}

enum class Unit { AngularFreq, Rate, Time, Length, Dimensionless };

// Multiplier taking a raw value in `u` to SI (rad/s, 1/s, s, m, or 1).
// Hz-family frequency units denote Omega/2pi values and pick up a 2 pi;
// `angular` (or a rad/* unit) suppresses that.
double unit_scale(Unit kind, const std::string& u, bool angular, const std::string& path) {
  const double two_pi = angular ? 1.0 : kTwoPi;
  switch (kind) {
    case Unit::AngularFreq:
      if (u == "Hz") return two_pi;
      if (u == "kHz") return two_pi * 1e3;
      if (u == "MHz") return two_pi * 1e6;
      if (u == "GHz") return two_pi * 1e9;
      if (u == "rad/s") return 1.0;
      if (u == "rad/ms") return 1e3;
      if (u == "rad/us") return 1e6;
      if (u == "rad/ns") return 1e9;
      fail(path, "unknown frequency unit \"" + u +
                     "\" (Hz/kHz/MHz/GHz are Omega/2pi values; use rad/s or "
                     "\"angular\": true for angular frequencies)");
    case Unit::Rate:
      if (u == "1/s" || u == "Hz") return 1.0;
      if (u == "1/ms" || u == "kHz") return 1e3;
      if (u == "1/us" || u == "MHz") return 1e6;
      if (u == "1/ns") return 1e9;
      fail(path, "unknown rate unit \"" + u + "\" (use 1/s, 1/ms, 1/us, 1/ns or Hz/kHz/MHz)");
    case Unit::Time:
      if (u == "s") return 1.0;
      if (u == "ms") return 1e-3;
      if (u == "us" || u == "\xc2\xb5s") return 1e-6;
      if (u == "ns") return 1e-9;
      if (u == "ps") return 1e-12;
      fail(path, "unknown time unit \"" + u + "\" (use s, ms, us, ns, ps)");
    case Unit::Length:
      if (u == "m") return 1.0;
      if (u == "cm") return 1e-2;
      if (u == "mm") return 1e-3;
      if (u == "um" || u == "\xc2\xb5m") return 1e-6;
      if (u == "nm") return 1e-9;
      fail(path, "unknown length unit \"" + u + "\" (use m, cm, mm, um, nm)");
    case Unit::Dimensionless:
      return 1.0;
  }
  fail(path, "internal: bad unit kind");
}

double parse_quantity(const njson& j, Unit kind, const std::string& path) {
  double value = 0.0;
  std::string unit;
  bool angular = false;

  if (j.is_number()) {
    if (kind != Unit::Dimensionless)
      fail(path, "bare numbers are reserved for dimensionless fields; write e.g. \"25.1 MHz\"");
    return j.get<double>();
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    size_t pos = 0;
    try {
      value = std::stod(s, &pos);
    } catch (const std::exception&) {
      fail(path, "cannot parse a leading number in \"" + s + "\"");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    size_t end = s.size();
    while (end > pos && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    unit = s.substr(pos, end - pos);
  } else if (j.is_object()) {
    if (!j.contains("value") || !j["value"].is_number())
      fail(path, "object form requires a numeric \"value\"");
    value = j["value"].get<double>();
    if (j.contains("unit")) {
      if (!j["unit"].is_string()) fail(path, "\"unit\" must be a string");
      unit = j["unit"].get<std::string>();
    }
    if (j.contains("angular")) {
      if (!j["angular"].is_boolean()) fail(path, "\"angular\" must be a boolean");
      angular = j["angular"].get<bool>();
    }
  } else {
    fail(path, "expected a number, a \"<number> <unit>\" string, or a {value, unit} object");
  }

  if (kind == Unit::Dimensionless) {
    if (!unit.empty()) fail(path, "dimensionless field must not carry a unit (got \"" + unit + "\")");
    return value;
  }
  if (unit.empty()) fail(path, "missing unit");
  return value * unit_scale(kind, unit, angular, path);
}

// Reject misspelled keys early; "_"-prefixed keys are free-form notes.
void check_keys(const njson& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& k = it.key();
    if (!k.empty() && k[0] == '_') continue;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return k == a; }) != allowed.end())
      continue;
    std::string msg = "unknown key \"" + k + "\" (allowed:";
    for (const char* a : allowed) msg += std::string(" ") + a;
    msg += "; keys starting with '_' are ignored)";
    fail(path, msg);
  }
}

struct Loader {
  std::vector<std::string> missing;

  static const njson* find(const njson& obj, const std::string& key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
  }
  const njson* require(const njson& obj, const std::string& key, const std::string& path) {
    const njson* p = find(obj, key);
    if (!p) missing.push_back(path);
    return p;
  }
  double quantity(const njson& obj, const std::string& key, Unit kind, const std::string& path,
                  double fallback) {
    const njson* p = find(obj, key);
    return p ? parse_quantity(*p, kind, path) : fallback;
  }
  // Required quantity; returns 0 and records the path when absent.
  double required_quantity(const njson& obj, const std::string& key, Unit kind,
                           const std::string& path) {
    const njson* p = require(obj, key, path);
    return p ? parse_quantity(*p, kind, path) : 0.0;
  }
  int integer(const njson& obj, const std::string& key, const std::string& path, int fallback) {
    const njson* p = find(obj, key);
    if (!p) return fallback;
    if (!p->is_number_integer()) fail(path, "expected an integer");
    return p->get<int>();
  }

  // Barred/unbarred duality: "name" holds the conventional value (2x barred),
  // "name_bar" the barred one. Exactly one of the pair may be present.
  double barred_pair(const njson& obj, const std::string& name, const std::string& parent,
                     Unit kind) {
    const njson* full = find(obj, name);
    const njson* bar = find(obj, name + "_bar");
    if (full && bar) fail(parent + "." + name, "give either " + name + " or " + name + "_bar, not both");
    if (bar) return parse_quantity(*bar, kind, parent + "." + name + "_bar");
    if (full) return 0.5 * parse_quantity(*full, kind, parent + "." + name);
    missing.push_back(parent + "." + name + " (or " + name + "_bar)");
    return 0.0;
  }
};

PulseEnvelope parse_pulse(const njson& j, const std::string& path, Loader& ld) {
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j,
             {"family", "peak_rabi", "peak_rabi_bar", "fwhm", "tau_e", "fwhm2", "separation",
              "amp_ratio", "time_unit", "rabi_unit", "rabi_angular", "rabi_barred", "times",
              "amplitudes"},
             path);

  const njson* fam = ld.require(j, "family", path + ".family");
  if (!fam) return PulseEnvelope::gaussian(0.0, 1.0, 0.0); // placeholder; load aborts on missing
  if (!fam->is_string()) fail(path + ".family", "expected a string");
  PulseEnvelope::Family family;
  try {
    family = pulse_family_from_string(fam->get<std::string>());
  } catch (const std::exception& e) {
    fail(path + ".family", e.what());
  }

  const size_t missing_before = ld.missing.size();

  if (family == PulseEnvelope::Family::Tabulated) {
    const njson* tu = ld.require(j, "time_unit", path + ".time_unit");
    const njson* ru = ld.require(j, "rabi_unit", path + ".rabi_unit");
    const njson* ts = ld.require(j, "times", path + ".times");
    const njson* as = ld.require(j, "amplitudes", path + ".amplitudes");
    if (ld.missing.size() != missing_before) return PulseEnvelope::gaussian(0.0, 1.0, 0.0);
    bool angular = false, barred = false;
    if (const njson* p = Loader::find(j, "rabi_angular")) angular = p->get<bool>();
    if (const njson* p = Loader::find(j, "rabi_barred")) barred = p->get<bool>();
    const double tscale = unit_scale(Unit::Time, tu->get<std::string>(), false, path + ".time_unit");
    const double rscale =
        unit_scale(Unit::AngularFreq, ru->get<std::string>(), angular, path + ".rabi_unit") *
        (barred ? 1.0 : 0.5);
    if (!ts->is_array() || !as->is_array() || ts->size() != as->size() || ts->size() < 2)
      fail(path, "\"times\" and \"amplitudes\" must be equal-length arrays of >= 2 numbers");
    std::vector<double> t, w;
    t.reserve(ts->size());
    w.reserve(as->size());
    for (const auto& v : *ts) t.push_back(v.get<double>() * tscale);
    for (const auto& v : *as) w.push_back(v.get<double>() * rscale);
    try {
      return PulseEnvelope::tabulated(std::move(t), std::move(w));
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }

  const njson* full = Loader::find(j, "peak_rabi");
  const njson* bar = Loader::find(j, "peak_rabi_bar");
  if (full && bar) fail(path + ".peak_rabi", "give either peak_rabi or peak_rabi_bar, not both");
  double peak_bar = 0.0;
  if (bar)
    peak_bar = parse_quantity(*bar, Unit::AngularFreq, path + ".peak_rabi_bar");
  else if (full)
    peak_bar = 0.5 * parse_quantity(*full, Unit::AngularFreq, path + ".peak_rabi");
  else
    ld.missing.push_back(path + ".peak_rabi (or peak_rabi_bar)");

  double fwhm = 0.0, tau_e = 0.0, fwhm2 = 0.0, separation = 0.0, amp_ratio = 1.0;
  switch (family) {
    case PulseEnvelope::Family::Gaussian:
      fwhm = ld.required_quantity(j, "fwhm", Unit::Time, path + ".fwhm");
      break;
    case PulseEnvelope::Family::RisingExponential:
      tau_e = ld.required_quantity(j, "tau_e", Unit::Time, path + ".tau_e");
      break;
    case PulseEnvelope::Family::DoubleGaussian:
      fwhm = ld.required_quantity(j, "fwhm", Unit::Time, path + ".fwhm");
      fwhm2 = ld.required_quantity(j, "fwhm2", Unit::Time, path + ".fwhm2");
      separation = ld.required_quantity(j, "separation", Unit::Time, path + ".separation");
      amp_ratio = ld.quantity(j, "amp_ratio", Unit::Dimensionless, path + ".amp_ratio", 1.0);
      break;
    case PulseEnvelope::Family::Tabulated:
      break; // handled above
  }
  if (ld.missing.size() != missing_before) return PulseEnvelope::gaussian(0.0, 1.0, 0.0);

  try {
    switch (family) {
      case PulseEnvelope::Family::Gaussian:
        return PulseEnvelope::gaussian(peak_bar, fwhm, 0.0);
      case PulseEnvelope::Family::RisingExponential:
        return PulseEnvelope::rising_exponential(peak_bar, tau_e, 0.0);
      case PulseEnvelope::Family::DoubleGaussian:
        return PulseEnvelope::double_gaussian(peak_bar, fwhm, fwhm2, separation, amp_ratio, 0.0);
      default:
        break;
    }
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  fail(path, "internal: unhandled pulse family");
}

ojson quantity_json(double value, const char* unit) {
  ojson j;
  j["value"] = value;
  j["unit"] = unit;
  return j;
}

ojson pulse_json(const PulseEnvelope& p) {
  ojson j;
  j["family"] = to_string(p.family);
  switch (p.family) {
    case PulseEnvelope::Family::Gaussian:
      j["peak_rabi_bar"] = quantity_json(p.peak_rabi_bar, "rad/s");
      j["fwhm"] = quantity_json(p.fwhm, "s");
      break;
    case PulseEnvelope::Family::RisingExponential:
      j["peak_rabi_bar"] = quantity_json(p.peak_rabi_bar, "rad/s");
      j["tau_e"] = quantity_json(p.tau_e, "s");
      break;
    case PulseEnvelope::Family::DoubleGaussian:
      j["peak_rabi_bar"] = quantity_json(p.peak_rabi_bar, "rad/s");
      j["fwhm"] = quantity_json(p.fwhm, "s");
      j["fwhm2"] = quantity_json(p.fwhm2, "s");
      j["separation"] = quantity_json(p.separation, "s");
      j["amp_ratio"] = p.amp_ratio;
      break;
    case PulseEnvelope::Family::Tabulated:
      j["time_unit"] = "s";
      j["rabi_unit"] = "rad/s";
      j["rabi_angular"] = true;
      j["rabi_barred"] = true;
      j["times"] = p.table_t;
      j["amplitudes"] = p.table_omega_bar;
      break;
  }
  return j;
}

} // namespace

void EnsembleParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("ensemble: ") + name + " must be finite and > 0");
  };
  positive(d_w_bar, "d_w_bar");
  positive(d_r_bar, "d_r_bar");
  positive(gamma_es, "gamma_es");
  positive(gamma_eg, "gamma_eg");
  positive(length_L, "length_L");
  positive(c, "c");
  if (!std::isfinite(delta) || delta == 0.0)
    throw std::invalid_argument("ensemble: write detuning delta must be finite and nonzero");
  if (spin_decay_mode == SpinDecay::Gaussian) {
    if (!(gamma_0 > 0.0) || !std::isfinite(gamma_0))
      throw std::invalid_argument(
          "ensemble: gamma_0 is a time constant in gaussian mode and must be > 0 "
          "(use a huge value for negligible decay)");
  } else if (!(gamma_0 >= 0.0) || !std::isfinite(gamma_0)) {
    throw std::invalid_argument("ensemble: gamma_0 rate must be finite and >= 0");
  }
}

void DetectionChain::validate() const {
  auto unit_interval = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(std::string("detection: ") + name + " must lie in [0, 1]");
  };
  unit_interval(eta_fiber, "eta_fiber");
  unit_interval(eta_filter, "eta_filter");
  unit_interval(eta_det, "eta_det");
  if (!(dark_rate >= 0.0)) throw std::invalid_argument("detection: dark_rate must be >= 0");
  if (!(gate_width >= 0.0)) throw std::invalid_argument("detection: gate_width must be >= 0");
}

void Scenario::validate() const {
  ensemble.validate();
  detection.validate();
  write_pulse.validate();
  read_pulse.validate();

  if (std::abs(write_pulse.t_start) > 1e-12)
    throw std::invalid_argument("scenario: write pulse support must start at t = 0");

  const double read_span = read_pulse.t_end - read_pulse.t_start;
  if (read_pulse.t_start < xi() - 1e-9 * read_span) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "scenario: read pulse begins %.6g s before the write window ends; "
                  "increase storage_delay by at least that much",
                  xi() - read_pulse.t_start);
    throw std::invalid_argument(buf);
  }

  const double tol =
      1e-9 * std::max({std::abs(storage_delay), read_span, write_pulse.t_end - write_pulse.t_start});
  if (std::abs(read_pulse.peak_time() - write_pulse.peak_time() - storage_delay) > tol)
    throw std::invalid_argument(
        "scenario: storage_delay disagrees with the pulse placement (read peak minus write peak)");

  if (!(extra_decoherence >= 0.0) || !std::isfinite(extra_decoherence))
    throw std::invalid_argument("scenario: extra_decoherence must be finite and >= 0");

  if (grids.write_table_points < 32 || grids.n_ti < 8 || grids.n_s < 8 || grids.n_u < 16 ||
      grids.n_v < 4 || grids.read_points < 16)
    throw std::invalid_argument("scenario: grid densities below minimum (see GridSpec)");
  if (!(grids.refine >= 0.25 && grids.refine <= 16.0))
    throw std::invalid_argument("scenario: grids.refine must lie in [0.25, 16]");
  if (!(grids.guard >= 0.0)) throw std::invalid_argument("scenario: grids.guard must be >= 0");
}

double Scenario::retrieval_decay(double t) const {
  double d;
  if (ensemble.spin_decay_mode == EnsembleParams::SpinDecay::Gaussian) {
    const double x = t / ensemble.gamma_0;
    d = std::exp(-0.5 * x * x);
  } else {
    d = std::exp(-ensemble.gamma_0 * (t - xi()));
  }
  if (extra_decoherence > 0.0) d *= std::exp(-extra_decoherence * (t - xi()));
  return d;
}

Scenario load_scenario(const std::string& json_text) {
  njson root;
  try {
    root = njson::parse(json_text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");
  check_keys(root,
             {"schema_version", "ensemble", "write_pulse", "read_pulse", "storage_delay",
              "detection", "grids", "extra_decoherence"},
             "(top level)");

  if (const njson* v = Loader::find(root, "schema_version")) {
    if (!v->is_number_integer() || v->get<int>() != 1)
      fail("schema_version", "this reader understands schema_version 1 only");
  }

  Loader ld;
  Scenario s;

  if (const njson* ens = ld.require(root, "ensemble", "ensemble")) {
    check_keys(*ens,
               {"d_w", "d_w_bar", "d_r", "d_r_bar", "gamma_es", "gamma_eg", "spin_decay", "delta",
                "length"},
               "ensemble");
    EnsembleParams& e = s.ensemble;
    e.d_w_bar = ld.barred_pair(*ens, "d_w", "ensemble", Unit::Dimensionless);
    e.d_r_bar = ld.barred_pair(*ens, "d_r", "ensemble", Unit::Dimensionless);
    e.gamma_es = ld.quantity(*ens, "gamma_es", Unit::AngularFreq, "ensemble.gamma_es",
                             kTwoPi * 3.03e6);
    e.gamma_eg = ld.quantity(*ens, "gamma_eg", Unit::AngularFreq, "ensemble.gamma_eg",
                             kTwoPi * 3.03e6);
    if (const njson* d = ld.require(*ens, "delta", "ensemble.delta"))
      e.delta = parse_quantity(*d, Unit::AngularFreq, "ensemble.delta");
    e.length_L = ld.quantity(*ens, "length", Unit::Length, "ensemble.length", 0.01);
    if (const njson* sd = Loader::find(*ens, "spin_decay")) {
      check_keys(*sd, {"mode", "gamma_0"}, "ensemble.spin_decay");
      const njson* mode = ld.require(*sd, "mode", "ensemble.spin_decay.mode");
      if (mode) {
        const std::string m = mode->get<std::string>();
        if (m == "gaussian") {
          e.spin_decay_mode = EnsembleParams::SpinDecay::Gaussian;
          e.gamma_0 = ld.required_quantity(*sd, "gamma_0", Unit::Time, "ensemble.spin_decay.gamma_0");
        } else if (m == "exponential") {
          e.spin_decay_mode = EnsembleParams::SpinDecay::Exponential;
          e.gamma_0 = ld.required_quantity(*sd, "gamma_0", Unit::Rate, "ensemble.spin_decay.gamma_0");
        } else {
          fail("ensemble.spin_decay.mode", "expected \"gaussian\" or \"exponential\"");
        }
      }
    } else {
      e.spin_decay_mode = EnsembleParams::SpinDecay::Gaussian;
      e.gamma_0 = 53e-6;
    }
  }

  if (const njson* w = ld.require(root, "write_pulse", "write_pulse"))
    s.write_pulse = parse_pulse(*w, "write_pulse", ld);
  if (const njson* r = ld.require(root, "read_pulse", "read_pulse"))
    s.read_pulse = parse_pulse(*r, "read_pulse", ld);

  if (const njson* d = ld.require(root, "storage_delay", "storage_delay"))
    s.storage_delay = parse_quantity(*d, Unit::Time, "storage_delay");

  if (const njson* det = Loader::find(root, "detection")) {
    check_keys(*det, {"eta_fiber", "eta_filter", "eta_det", "dark_rate", "gate_width"}, "detection");
    s.detection.eta_fiber =
        ld.quantity(*det, "eta_fiber", Unit::Dimensionless, "detection.eta_fiber", 1.0);
    s.detection.eta_filter =
        ld.quantity(*det, "eta_filter", Unit::Dimensionless, "detection.eta_filter", 1.0);
    s.detection.eta_det = ld.quantity(*det, "eta_det", Unit::Dimensionless, "detection.eta_det", 1.0);
    s.detection.dark_rate = ld.quantity(*det, "dark_rate", Unit::Rate, "detection.dark_rate", 0.0);
    s.detection.gate_width =
        ld.quantity(*det, "gate_width", Unit::Time, "detection.gate_width", 0.0);
  }

  if (const njson* g = Loader::find(root, "grids")) {
    check_keys(*g, {"write_table_points", "n_ti", "n_s", "n_u", "n_v", "read_points", "refine",
                    "guard"},
               "grids");
    s.grids.write_table_points =
        ld.integer(*g, "write_table_points", "grids.write_table_points", s.grids.write_table_points);
    s.grids.n_ti = ld.integer(*g, "n_ti", "grids.n_ti", s.grids.n_ti);
    s.grids.n_s = ld.integer(*g, "n_s", "grids.n_s", s.grids.n_s);
    s.grids.n_u = ld.integer(*g, "n_u", "grids.n_u", s.grids.n_u);
    s.grids.n_v = ld.integer(*g, "n_v", "grids.n_v", s.grids.n_v);
    s.grids.read_points = ld.integer(*g, "read_points", "grids.read_points", s.grids.read_points);
    s.grids.refine = ld.quantity(*g, "refine", Unit::Dimensionless, "grids.refine", 1.0);
    s.grids.guard = ld.quantity(*g, "guard", Unit::Time, "grids.guard", 0.0);
  }

  s.extra_decoherence =
      ld.quantity(root, "extra_decoherence", Unit::AngularFreq, "extra_decoherence", 0.0);

  if (!ld.missing.empty()) {
    std::string msg = "config is missing required fields:";
    for (const auto& m : ld.missing) msg += " " + m + ";";
    msg.pop_back();
    throw std::invalid_argument(msg);
  }

  // Normalize the time origin: write support starts at t = 0, the read pulse
  // peak sits storage_delay after the write peak.
  s.write_pulse.shift(-s.write_pulse.t_start);
  s.read_pulse.shift(s.write_pulse.peak_time() + s.storage_delay - s.read_pulse.peak_time());

  s.validate();
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_scenario(ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string serialize_scenario(const Scenario& s) {
  ojson root;
  root["schema_version"] = 1;

  ojson ens;
  ens["d_w_bar"] = s.ensemble.d_w_bar;
  ens["d_r_bar"] = s.ensemble.d_r_bar;
  ens["gamma_es"] = quantity_json(s.ensemble.gamma_es, "rad/s");
  ens["gamma_eg"] = quantity_json(s.ensemble.gamma_eg, "rad/s");
  ojson sd;
  const bool gauss = s.ensemble.spin_decay_mode == EnsembleParams::SpinDecay::Gaussian;
  sd["mode"] = gauss ? "gaussian" : "exponential";
  sd["gamma_0"] = quantity_json(s.ensemble.gamma_0, gauss ? "s" : "1/s");
  ens["spin_decay"] = sd;
  ens["delta"] = quantity_json(s.ensemble.delta, "rad/s");
  ens["length"] = quantity_json(s.ensemble.length_L, "m");
  root["ensemble"] = ens;

  root["write_pulse"] = pulse_json(s.write_pulse);
  root["read_pulse"] = pulse_json(s.read_pulse);
  root["storage_delay"] = quantity_json(s.storage_delay, "s");

  ojson det;
  det["eta_fiber"] = s.detection.eta_fiber;
  det["eta_filter"] = s.detection.eta_filter;
  det["eta_det"] = s.detection.eta_det;
  det["dark_rate"] = quantity_json(s.detection.dark_rate, "1/s");
  det["gate_width"] = quantity_json(s.detection.gate_width, "s");
  root["detection"] = det;

  ojson g;
  g["write_table_points"] = s.grids.write_table_points;
  g["n_ti"] = s.grids.n_ti;
  g["n_s"] = s.grids.n_s;
  g["n_u"] = s.grids.n_u;
  g["n_v"] = s.grids.n_v;
  g["read_points"] = s.grids.read_points;
  g["refine"] = s.grids.refine;
  g["guard"] = quantity_json(s.grids.guard, "s");
  root["grids"] = g;

  root["extra_decoherence"] = quantity_json(s.extra_decoherence, "rad/s");
  return root.dump(2) + "\n";
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = serialize_scenario(s);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

double max_omega_bar(const PulseEnvelope& p) {
  if (p.family == PulseEnvelope::Family::Tabulated)
    return *std::max_element(p.table_omega_bar.begin(), p.table_omega_bar.end());
  return p.peak_rabi_bar;
}

} // namespace

std::vector<Warning> validate_regime(const Scenario& s, double eps1, double kappa) {
  std::vector<Warning> out;
  const EnsembleParams& e = s.ensemble;
  char buf[240];

  // Hard when the violation exceeds 4x in the failing direction.
  auto severity = [](double ratio) {
    return ratio > 4.0 ? Warning::Severity::Hard : Warning::Severity::Soft;
  };

  const double tau_w = s.write_pulse.intensity_fwhm();
  const double gain_w = e.gamma_es * tau_w * e.d_w_bar;
  if (gain_w > eps1) {
    std::snprintf(buf, sizeof(buf),
                  "write pulse long enough to build collective gain during the write window "
                  "(gamma_es * fwhm * d_w_bar = %.3g exceeds %.3g); spontaneous pair emission "
                  "is no longer perturbative",
                  gain_w, eps1);
    out.push_back({"write_adiabatic_gain", gain_w, eps1, severity(gain_w / eps1), buf});
  }

  const double omega_w = max_omega_bar(s.write_pulse);
  const double detuning_floor = kappa * std::max(omega_w, e.gamma_es);
  if (std::abs(e.delta) < detuning_floor) {
    std::snprintf(buf, sizeof(buf),
                  "write detuning |delta| = %.3g rad/s is below %.3g (%g x the larger of the "
                  "peak Rabi frequency and gamma_es); the far-detuned elimination of the "
                  "excited state degrades",
                  std::abs(e.delta), detuning_floor, kappa);
    out.push_back({"write_detuning", std::abs(e.delta), detuning_floor,
                   severity(detuning_floor / std::max(std::abs(e.delta), 1e-300)), buf});
  }

  if (e.d_r_bar < 1.0) {
    std::snprintf(buf, sizeof(buf),
                  "read optical depth d_r_bar = %.3g is below 1; retrieval is dominated by "
                  "leakage and the efficiency figures lose meaning",
                  e.d_r_bar);
    out.push_back({"read_od", e.d_r_bar, 1.0, severity(1.0 / std::max(e.d_r_bar, 1e-300)), buf});
  }

  const double tau_r = s.read_pulse.intensity_fwhm();
  const double bw = tau_r * e.gamma_eg * e.d_r_bar;
  if (bw < 1.0) {
    std::snprintf(buf, sizeof(buf),
                  "read pulse too short for the ensemble bandwidth (fwhm * gamma_eg * d_r_bar "
                  "= %.3g is below 1); retrieved photons outrun the adiabatic response",
                  bw);
    out.push_back({"read_duration", bw, 1.0, severity(1.0 / std::max(bw, 1e-300)), buf});
  }

  return out;
}

std::string warnings_to_json(const std::vector<Warning>& w) {
  ojson arr = ojson::array();
  for (const auto& v : w) {
    ojson j;
    j["name"] = v.name;
    j["measured"] = v.measured;
    j["threshold"] = v.threshold;
    j["severity"] = v.severity == Warning::Severity::Hard ? "hard" : "soft";
    j["message"] = v.message;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

} // namespace dlcz
