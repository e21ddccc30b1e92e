#include "dlcz.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlcz/analysis.hpp"
#include "dlcz/model.hpp"
#include "dlcz/photon_stats.hpp"
#include "dlcz/solver.hpp"
#include "json.hpp"

struct dlcz_scenario {
  dlcz::Scenario v;
};

struct dlcz_solver {
  explicit dlcz_solver(const dlcz::Scenario& s) : v(s) {}
  dlcz::RetrievalSolver v;
};

struct dlcz_waveform {
  dlcz::Waveform v;
};

namespace {

using nlohmann::ordered_json;

thread_local std::string g_error;

int fail(int code, const std::string& msg) {
  g_error = msg;
  return code;
}

char* dup_cstr(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int out_string(char** out, const std::string& s) {
  char* p = dup_cstr(s);
  if (p == nullptr) return fail(DLCZ_ERR_INTERNAL, "out of memory");
  *out = p;
  return DLCZ_OK;
}

// Run `fn` (which returns a status code) and translate exceptions into codes.
// Input-dependent failures (bad values, unmeasurable curves, degenerate
// statistics) surface as DLCZ_ERR_INVALID_INPUT; everything else is internal.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    return fail(DLCZ_ERR_INVALID_INPUT, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(DLCZ_ERR_INVALID_INPUT, e.what());
  } catch (const std::domain_error& e) {
    return fail(DLCZ_ERR_INVALID_INPUT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DLCZ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DLCZ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DLCZ_ERR_INTERNAL, "unknown error");
  }
}

int require(bool ok, const char* what) {
  if (ok) return DLCZ_OK;
  return fail(DLCZ_ERR_INVALID_INPUT, std::string(what) + " must not be NULL");
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Counting-experiment configuration for dlcz_g2.

struct G2Config {
  dlcz::TmsvDetectorModel base;
  double dark_rate_hz = 0.0;
  double gate_width_s = 0.0;
  std::string p_source = "explicit";
  std::string eta_read_source = "explicit";
  std::optional<std::string> scenario_hash;
  std::string scan_parameter;  // empty = single point at the base values
  std::vector<double> scan_values;
};

const std::vector<std::string> kG2Keys = {
    "preset",     "scenario",  "pair_probability", "modes",
    "n_max",      "eta_write", "eta_read1",        "eta_read2",
    "split_ratio", "dark_rate_hz", "gate_width_s", "scan"};
const std::vector<std::string> kG2ScanParams = {
    "pair_probability", "gate_width_s", "dark_rate_hz",
    "eta_read",         "split_ratio",  "modes"};

void check_g2_keys(const ordered_json& j) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (!key.empty() && key[0] == '_') continue;  // comment convention
    bool known = false;
    for (const auto& k : kG2Keys) known = known || (k == key);
    if (!known)
      throw std::invalid_argument("unknown counting-config key \"" + key +
                                  "\"");
  }
}

void apply_darks(dlcz::TmsvDetectorModel& m, double rate, double width) {
  const double d = dlcz::dark_probability(rate, width);
  m.dark_w = d;
  m.dark_r1 = d;
  m.dark_r2 = d;
}

G2Config parse_g2_config(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  if (!j.is_object())
    throw std::invalid_argument("counting config must be a JSON object");
  check_g2_keys(j);
  if (j.contains("preset") && j.contains("scenario"))
    throw std::invalid_argument(
        "counting config: give either \"preset\" or \"scenario\", not both");

  G2Config cfg;
  std::optional<dlcz::Scenario> scn;
  if (j.contains("preset"))
    scn = dlcz::preset_scenario(j.at("preset").get<std::string>());
  else if (j.contains("scenario"))
    scn = dlcz::load_scenario(j.at("scenario").dump());

  if (scn) {
    cfg.scenario_hash = dlcz::scenario_hash(*scn);
    const auto& det = scn->detection;
    const double chain = det.eta_fiber * det.eta_filter * det.eta_det;
    cfg.base.eta_w = chain;
    cfg.dark_rate_hz = det.dark_rate;
    cfg.gate_width_s = det.gate_width > 0.0
                           ? det.gate_width
                           : scn->read_end() - scn->read_start();
    // Pair probability and read-arm efficiency come from the retrieval
    // solver: p is the write emission probability per attempt, and a read
    // photon must survive retrieval as well as the detection chain.
    dlcz::RetrievalSolver solver(*scn);
    const dlcz::Waveform w = solver.conditional_flux();
    cfg.base.p = w.write_prob;
    cfg.base.eta_r1 = w.efficiency_raw * chain;
    cfg.base.eta_r2 = cfg.base.eta_r1;
    cfg.p_source = "scenario";
    cfg.eta_read_source = "scenario_retrieval_chain";
  }

  if (j.contains("pair_probability")) {
    cfg.base.p = j.at("pair_probability").get<double>();
    cfg.p_source = "explicit";
  } else if (!scn) {
    throw std::invalid_argument(
        "counting config: \"pair_probability\" is required when no "
        "\"preset\" or \"scenario\" is given");
  }
  if (j.contains("modes")) cfg.base.K = j.at("modes").get<int>();
  if (j.contains("n_max")) cfg.base.n_max = j.at("n_max").get<int>();
  if (j.contains("eta_write")) cfg.base.eta_w = j.at("eta_write").get<double>();
  if (j.contains("eta_read1")) {
    cfg.base.eta_r1 = j.at("eta_read1").get<double>();
    cfg.eta_read_source = "explicit";
  }
  if (j.contains("eta_read2")) {
    cfg.base.eta_r2 = j.at("eta_read2").get<double>();
    cfg.eta_read_source = "explicit";
  }
  if (j.contains("split_ratio"))
    cfg.base.split_ratio = j.at("split_ratio").get<double>();
  if (j.contains("dark_rate_hz"))
    cfg.dark_rate_hz = j.at("dark_rate_hz").get<double>();
  if (j.contains("gate_width_s"))
    cfg.gate_width_s = j.at("gate_width_s").get<double>();
  if (cfg.dark_rate_hz < 0.0 || cfg.gate_width_s < 0.0)
    throw std::invalid_argument(
        "counting config: dark_rate_hz and gate_width_s must be >= 0");
  apply_darks(cfg.base, cfg.dark_rate_hz, cfg.gate_width_s);

  if (j.contains("scan")) {
    const ordered_json& s = j.at("scan");
    if (!s.is_object() || !s.contains("parameter") || !s.contains("values"))
      throw std::invalid_argument(
          "counting config: \"scan\" needs \"parameter\" and \"values\"");
    cfg.scan_parameter = s.at("parameter").get<std::string>();
    bool known = false;
    for (const auto& k : kG2ScanParams)
      known = known || (k == cfg.scan_parameter);
    if (!known)
      throw std::invalid_argument("counting config: unknown scan parameter \"" +
                                  cfg.scan_parameter + "\"");
    cfg.scan_values = s.at("values").get<std::vector<double>>();
    if (cfg.scan_values.empty())
      throw std::invalid_argument(
          "counting config: scan \"values\" must be non-empty");
  }
  return cfg;
}

// The base model with one scanned parameter replaced.
dlcz::TmsvDetectorModel g2_point_model(const G2Config& cfg,
                                       const std::string& param, double x) {
  dlcz::TmsvDetectorModel m = cfg.base;
  double rate = cfg.dark_rate_hz;
  double width = cfg.gate_width_s;
  if (param == "pair_probability") {
    m.p = x;
  } else if (param == "gate_width_s") {
    width = x;
  } else if (param == "dark_rate_hz") {
    rate = x;
  } else if (param == "eta_read") {
    m.eta_r1 = x;
    m.eta_r2 = x;
  } else if (param == "split_ratio") {
    m.split_ratio = x;
  } else if (param == "modes") {
    m.K = static_cast<int>(std::llround(x));
  }
  if (rate < 0.0 || width < 0.0)
    throw std::invalid_argument(
        "counting scan: dark_rate_hz and gate_width_s must be >= 0");
  apply_darks(m, rate, width);
  return m;
}

}  // namespace

extern "C" {

const char* dlcz_version(void) { return dlcz::kToolVersion; }

const char* dlcz_last_error(void) { return g_error.c_str(); }

void dlcz_string_free(char* s) { std::free(s); }

// ----- scenarios -----------------------------------------------------------

int dlcz_scenario_from_json(const char* json_text, dlcz_scenario** out) {
  if (int rc = require(json_text && out, "json_text/out")) return rc;
  return guarded([&] {
    auto* handle = new dlcz_scenario{dlcz::load_scenario(json_text)};
    *out = handle;
    return DLCZ_OK;
  });
}

int dlcz_scenario_from_preset(const char* preset_id, dlcz_scenario** out) {
  if (int rc = require(preset_id && out, "preset_id/out")) return rc;
  return guarded([&] {
    auto* handle = new dlcz_scenario{dlcz::preset_scenario(preset_id)};
    *out = handle;
    return DLCZ_OK;
  });
}

void dlcz_scenario_free(dlcz_scenario* s) { delete s; }

int dlcz_scenario_canonical_json(const dlcz_scenario* s, char** out_json) {
  if (int rc = require(s && out_json, "scenario/out_json")) return rc;
  return guarded(
      [&] { return out_string(out_json, dlcz::serialize_scenario(s->v)); });
}

int dlcz_scenario_hash(const dlcz_scenario* s, char* out_hash) {
  if (int rc = require(s && out_hash, "scenario/out_hash")) return rc;
  return guarded([&] {
    const std::string h = dlcz::scenario_hash(s->v);
    std::memcpy(out_hash, h.c_str(), h.size() + 1);
    return DLCZ_OK;
  });
}

int dlcz_scenario_warnings_json(const dlcz_scenario* s, char** out_json) {
  if (int rc = require(s && out_json, "scenario/out_json")) return rc;
  return guarded([&] {
    return out_string(out_json,
                      dlcz::warnings_to_json(dlcz::validate_regime(s->v)));
  });
}

int dlcz_preset_ids_json(char** out_json) {
  if (int rc = require(out_json, "out_json")) return rc;
  return guarded([&] {
    ordered_json arr = ordered_json::array();
    for (const auto& id : dlcz::preset_ids()) arr.push_back(id);
    return out_string(out_json, arr.dump() + "\n");
  });
}

int dlcz_preset_json(const char* preset_id, char** out_json) {
  if (int rc = require(preset_id && out_json, "preset_id/out_json")) return rc;
  return guarded(
      [&] { return out_string(out_json, dlcz::preset_json(preset_id)); });
}

// ----- retrieval solver ------------------------------------------------------

int dlcz_solver_create(const dlcz_scenario* s, dlcz_solver** out) {
  if (int rc = require(s && out, "scenario/out")) return rc;
  return guarded([&] {
    auto* handle = new dlcz_solver(s->v);
    *out = handle;
    return DLCZ_OK;
  });
}

void dlcz_solver_free(dlcz_solver* s) { delete s; }

int dlcz_solver_waveform(dlcz_solver* s, dlcz_waveform** out) {
  if (int rc = require(s && out, "solver/out")) return rc;
  return guarded([&] {
    auto* handle = new dlcz_waveform{s->v.conditional_flux()};
    *out = handle;
    return DLCZ_OK;
  });
}

void dlcz_waveform_free(dlcz_waveform* w) { delete w; }

int dlcz_waveform_size(const dlcz_waveform* w) {
  if (w == nullptr) return 0;
  return static_cast<int>(w->v.t.size());
}

double dlcz_waveform_time(const dlcz_waveform* w, int i) {
  if (w == nullptr || i < 0 || i >= static_cast<int>(w->v.t.size()))
    return std::nan("");
  return w->v.t[static_cast<size_t>(i)];
}

double dlcz_waveform_flux(const dlcz_waveform* w, int i) {
  if (w == nullptr || i < 0 || i >= static_cast<int>(w->v.flux.size()))
    return std::nan("");
  return w->v.flux[static_cast<size_t>(i)];
}

double dlcz_waveform_efficiency(const dlcz_waveform* w) {
  return w == nullptr ? std::nan("") : w->v.efficiency;
}

double dlcz_waveform_efficiency_raw(const dlcz_waveform* w) {
  return w == nullptr ? std::nan("") : w->v.efficiency_raw;
}

double dlcz_waveform_write_probability(const dlcz_waveform* w) {
  return w == nullptr ? std::nan("") : w->v.write_prob;
}

double dlcz_waveform_quad_error(const dlcz_waveform* w) {
  return w == nullptr ? std::nan("") : w->v.quad_error;
}

int dlcz_waveform_csv(const dlcz_waveform* w, char** out_csv) {
  if (int rc = require(w && out_csv, "waveform/out_csv")) return rc;
  return guarded([&] { return out_string(out_csv, dlcz::waveform_csv(w->v)); });
}

int dlcz_waveform_summary_json(const dlcz_waveform* w, const dlcz_scenario* s,
                               char** out_json) {
  if (int rc = require(w && s && out_json, "waveform/scenario/out_json"))
    return rc;
  return guarded([&] {
    return out_string(out_json, dlcz::waveform_summary_json(w->v, s->v));
  });
}

int dlcz_fwhm(const double* t, const double* y, int n, double* out_fwhm_s,
              int* out_multi_peak) {
  if (int rc = require(t && y && out_fwhm_s, "t/y/out_fwhm_s")) return rc;
  if (n < 3) return fail(DLCZ_ERR_INVALID_INPUT, "need at least 3 samples");
  return guarded([&] {
    const std::vector<double> tv(t, t + n);
    const std::vector<double> yv(y, y + n);
    const dlcz::FwhmResult r = dlcz::measure_fwhm(tv, yv);
    *out_fwhm_s = r.fwhm;
    if (out_multi_peak != nullptr) *out_multi_peak = r.multi_peak ? 1 : 0;
    return DLCZ_OK;
  });
}

// ----- scans and figure runs -------------------------------------------------

int dlcz_scan_duration(const dlcz_scenario* s, const double* fwhms_s, int n,
                       int reoptimize_power, char** out_csv, char** out_json) {
  if (int rc = require(s && fwhms_s && out_csv && out_json,
                       "scenario/fwhms_s/out_csv/out_json"))
    return rc;
  if (n <= 0) return fail(DLCZ_ERR_INVALID_INPUT, "need at least 1 scan value");
  return guarded([&] {
    const std::vector<double> values(fwhms_s, fwhms_s + n);
    const dlcz::ScanResult r =
        dlcz::scan_duration(s->v, values, reoptimize_power != 0);
    if (int rc = out_string(out_csv, dlcz::scan_csv(r))) return rc;
    if (int rc = out_string(out_json, dlcz::scan_json(r))) {
      dlcz_string_free(*out_csv);
      *out_csv = nullptr;
      return rc;
    }
    if (r.n_failed > 0)
      return fail(DLCZ_ERR_PARTIAL_SCAN,
                  std::to_string(r.n_failed) + " of " +
                      std::to_string(r.points.size()) +
                      " scan points failed; see the per-point errors in the "
                      "JSON report");
    return DLCZ_OK;
  });
}

int dlcz_scan_delay(const dlcz_scenario* s, const double* delays_s, int n,
                    char** out_csv, char** out_json) {
  if (int rc = require(s && delays_s && out_csv && out_json,
                       "scenario/delays_s/out_csv/out_json"))
    return rc;
  if (n <= 0) return fail(DLCZ_ERR_INVALID_INPUT, "need at least 1 scan value");
  return guarded([&] {
    const std::vector<double> values(delays_s, delays_s + n);
    const dlcz::ScanResult r = dlcz::scan_delay(s->v, values);
    if (int rc = out_string(out_csv, dlcz::scan_csv(r))) return rc;
    if (int rc = out_string(out_json, dlcz::scan_json(r))) {
      dlcz_string_free(*out_csv);
      *out_csv = nullptr;
      return rc;
    }
    if (r.n_failed > 0)
      return fail(DLCZ_ERR_PARTIAL_SCAN,
                  std::to_string(r.n_failed) + " of " +
                      std::to_string(r.points.size()) +
                      " scan points failed; see the per-point errors in the "
                      "JSON report");
    return DLCZ_OK;
  });
}

int dlcz_scan_power(const dlcz_scenario* s, double peak_lo_bar,
                    double peak_hi_bar, char** out_csv, char** out_json) {
  if (int rc = require(s && out_csv && out_json, "scenario/out_csv/out_json"))
    return rc;
  return guarded([&] {
    double lo = peak_lo_bar;
    double hi = peak_hi_bar;
    if (hi <= 0.0) hi = dlcz::power_for_sweep_depth(s->v, 12.0);
    if (lo <= 0.0) lo = dlcz::power_for_sweep_depth(s->v, 0.01);
    const dlcz::PowerOptimum opt = dlcz::optimize_read_power(s->v, lo, hi);
    if (int rc = out_string(out_csv, dlcz::power_curve_csv(opt))) return rc;
    if (int rc = out_string(out_json, dlcz::power_curve_json(opt, s->v))) {
      dlcz_string_free(*out_csv);
      *out_csv = nullptr;
      return rc;
    }
    return DLCZ_OK;
  });
}

int dlcz_reproduce_figure(const char* figure_id, char** out_csv,
                          char** out_json, int* out_all_bands_pass) {
  if (int rc =
          require(figure_id && out_csv && out_json, "figure_id/out_csv/out_json"))
    return rc;
  return guarded([&] {
    const dlcz::FigureResult r = dlcz::reproduce_figure(figure_id);
    if (int rc = out_string(out_csv, r.csv)) return rc;
    if (int rc = out_string(out_json, r.summary_json)) {
      dlcz_string_free(*out_csv);
      *out_csv = nullptr;
      return rc;
    }
    if (out_all_bands_pass != nullptr)
      *out_all_bands_pass = r.all_bands_pass ? 1 : 0;
    return DLCZ_OK;
  });
}

// ----- photon-counting statistics ---------------------------------------------

int dlcz_g2(const char* config_json, char** out_csv, char** out_json) {
  if (int rc =
          require(config_json && out_csv && out_json, "config/out_csv/out_json"))
    return rc;
  return guarded([&] {
    const G2Config cfg = parse_g2_config(config_json);

    const std::string param =
        cfg.scan_parameter.empty() ? "pair_probability" : cfg.scan_parameter;
    std::vector<double> values = cfg.scan_values;
    if (values.empty()) values.push_back(cfg.base.p);

    std::string csv = param +
                      ",g2_conditional,g2_unconditional,p_write,p_read1,"
                      "p_read2,p_triple,ok,error\n";
    ordered_json points = ordered_json::array();
    int n_failed = 0;
    for (double x : values) {
      ordered_json pt;
      pt["value"] = x;
      std::string err;
      double g2c = std::nan(""), g2u = std::nan("");
      double pw = std::nan(""), p1 = std::nan(""), p2 = std::nan("");
      double triple = std::nan("");
      try {
        const dlcz::TmsvDetectorModel m = g2_point_model(cfg, param, x);
        const dlcz::CountProbabilities c = dlcz::click_probabilities(m);
        pw = c.p[1][0][0] + c.p[1][0][1] + c.p[1][1][0] + c.p[1][1][1];
        p1 = c.p[0][1][0] + c.p[0][1][1] + c.p[1][1][0] + c.p[1][1][1];
        p2 = c.p[0][0][1] + c.p[0][1][1] + c.p[1][0][1] + c.p[1][1][1];
        triple = c.p[1][1][1];
        g2c = dlcz::g2_conditional(m);
        g2u = dlcz::g2_unconditional(m);
      } catch (const std::exception& e) {
        err = e.what();
        ++n_failed;
      }
      csv += fmt_g17(x) + "," + fmt_g17(g2c) + "," + fmt_g17(g2u) + "," +
             fmt_g17(pw) + "," + fmt_g17(p1) + "," + fmt_g17(p2) + "," +
             fmt_g17(triple) + "," + (err.empty() ? "1" : "0") + ",\"" + err +
             "\"\n";
      pt["ok"] = err.empty();
      if (!err.empty()) pt["error"] = err;
      if (err.empty()) {
        pt["g2_conditional"] = g2c;
        pt["g2_unconditional"] = g2u;
        pt["clicks"] = {{"p_write", pw},
                        {"p_read1", p1},
                        {"p_read2", p2},
                        {"p_triple", triple}};
      }
      points.push_back(pt);
    }

    ordered_json j;
    j["kind"] = "counting_statistics";
    j["tool_version"] = dlcz::kToolVersion;
    ordered_json model;
    model["pair_probability"] = cfg.base.p;
    model["pair_probability_source"] = cfg.p_source;
    model["modes"] = cfg.base.K;
    model["n_max"] = cfg.base.n_max;
    model["eta_write"] = cfg.base.eta_w;
    model["eta_read1"] = cfg.base.eta_r1;
    model["eta_read2"] = cfg.base.eta_r2;
    model["eta_read_source"] = cfg.eta_read_source;
    model["split_ratio"] = cfg.base.split_ratio;
    model["dark_rate_hz"] = cfg.dark_rate_hz;
    model["gate_width_s"] = cfg.gate_width_s;
    if (cfg.scenario_hash) model["scenario_hash"] = *cfg.scenario_hash;
    j["model"] = model;
    j["scan"] = {{"parameter", param}, {"n_points", values.size()},
                 {"n_failed", n_failed}};
    j["points"] = points;

    if (int rc = out_string(out_csv, csv)) return rc;
    if (int rc = out_string(out_json, j.dump(2) + "\n")) {
      dlcz_string_free(*out_csv);
      *out_csv = nullptr;
      return rc;
    }
    if (n_failed == static_cast<int>(values.size()))
      return fail(DLCZ_ERR_INVALID_INPUT,
                  "every counting point failed: " +
                      points.back().value("error", std::string("unknown")));
    if (n_failed > 0)
      return fail(DLCZ_ERR_PARTIAL_SCAN,
                  std::to_string(n_failed) + " of " +
                      std::to_string(values.size()) +
                      " counting points failed; see the per-point errors in "
                      "the JSON report");
    return DLCZ_OK;
  });
}

}  // extern "C"
