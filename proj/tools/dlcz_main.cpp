// Command-line front end for the photon-pair retrieval simulator.
//
// Talks to the library exclusively through the C interface (dlcz.h); all
// physics, serialization, and validation live behind that boundary.
//
// Exit codes: 0 success, 1 invalid input (or internal failure), 2 numerical
// non-convergence beyond --tolerance, 3 partial scan failure (some points
// failed; results for the rest were still written).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dlcz.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitPartial = 3;

// Shared per-verb options.
struct CommonOpts {
  std::string config;
  std::string out_dir;
  double tolerance = 1e-3;
  int threads = 1;      // reserved: this build evaluates scan points serially
  long long seed = 0;   // reserved: every solver path is deterministic
};

void add_common(CLI::App* cmd, CommonOpts* o, bool config_required) {
  auto* cfg = cmd->add_option("--config", o->config,
                              "Scenario (or counting-config) JSON file");
  if (config_required) cfg->required();
  cmd->add_option("--out", o->out_dir,
                  "Directory for CSV/JSON result files (created if missing)");
  cmd->add_option("--tolerance", o->tolerance,
                  "Maximum accepted relative quadrature disagreement")
      ->capture_default_str();
  cmd->add_option("--threads", o->threads,
                  "Reserved; scan points are evaluated serially in this build")
      ->capture_default_str();
  cmd->add_option("--seed", o->seed,
                  "Reserved; all computations are deterministic")
      ->capture_default_str();
}

int code_to_exit(int rc) {
  switch (rc) {
    case DLCZ_OK:
      return kExitOk;
    case DLCZ_ERR_INVALID_INPUT:
      return kExitInput;
    case DLCZ_ERR_NONCONVERGENCE:
      return kExitNonConvergence;
    case DLCZ_ERR_PARTIAL_SCAN:
      return kExitPartial;
    default:
      return kExitInput;
  }
}

// Report a C-interface failure and translate it into an exit code.
int report(int rc, const std::string& what) {
  std::cerr << "error: " << what << ": " << dlcz_last_error() << "\n";
  return code_to_exit(rc);
}

bool read_file(const std::string& path, std::string* out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  *out = ss.str();
  return true;
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return bool(out);
}

// Write <stem>.csv and <stem>.json into the --out directory (when given) and
// echo the JSON report to stdout. Returns false on filesystem failure.
bool emit_results(const CommonOpts& o, const std::string& stem,
                  const char* csv, const char* json) {
  std::cout << json;
  if (o.out_dir.empty()) return true;
  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << o.out_dir << ": "
              << ec.message() << "\n";
    return false;
  }
  const std::filesystem::path dir(o.out_dir);
  const auto csv_path = dir / (stem + ".csv");
  const auto json_path = dir / (stem + ".json");
  if (!write_file(csv_path, csv) || !write_file(json_path, json)) {
    std::cerr << "error: cannot write results under " << o.out_dir << "\n";
    return false;
  }
  std::cerr << "wrote " << csv_path.string() << "\n";
  std::cerr << "wrote " << json_path.string() << "\n";
  return true;
}

// RAII holders for C-interface resources.
struct Str {
  char* p = nullptr;
  ~Str() { dlcz_string_free(p); }
};
struct ScenarioHandle {
  dlcz_scenario* p = nullptr;
  ~ScenarioHandle() { dlcz_scenario_free(p); }
};
struct SolverHandle {
  dlcz_solver* p = nullptr;
  ~SolverHandle() { dlcz_solver_free(p); }
};
struct WaveformHandle {
  dlcz_waveform* p = nullptr;
  ~WaveformHandle() { dlcz_waveform_free(p); }
};

int load_scenario(const CommonOpts& o, ScenarioHandle* s) {
  std::string text;
  if (!read_file(o.config, &text)) {
    std::cerr << "error: cannot read config file " << o.config << "\n";
    return kExitInput;
  }
  const int rc = dlcz_scenario_from_json(text.c_str(), &s->p);
  if (rc != DLCZ_OK) return report(rc, "invalid scenario " + o.config);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Verbs

int cmd_validate(const CommonOpts& o) {
  ScenarioHandle s;
  if (int rc = load_scenario(o, &s)) return rc;
  char hash[17] = {};
  Str warnings;
  if (int rc = dlcz_scenario_hash(s.p, hash))
    return report(rc, "hashing failed");
  if (int rc = dlcz_scenario_warnings_json(s.p, &warnings.p))
    return report(rc, "regime validation failed");
  std::cout << "{\n  \"valid\": true,\n  \"scenario_hash\": \"" << hash
            << "\",\n  \"tool_version\": \"" << dlcz_version()
            << "\",\n  \"regime_warnings\": " << warnings.p << "}\n";
  return kExitOk;
}

int cmd_run(const CommonOpts& o) {
  ScenarioHandle s;
  if (int rc = load_scenario(o, &s)) return rc;
  SolverHandle solver;
  if (int rc = dlcz_solver_create(s.p, &solver.p))
    return report(rc, "solver setup failed");
  WaveformHandle w;
  if (int rc = dlcz_solver_waveform(solver.p, &w.p))
    return report(rc, "waveform computation failed");
  Str csv, json;
  if (int rc = dlcz_waveform_csv(w.p, &csv.p))
    return report(rc, "CSV serialization failed");
  if (int rc = dlcz_waveform_summary_json(w.p, s.p, &json.p))
    return report(rc, "summary serialization failed");
  if (!emit_results(o, "waveform", csv.p, json.p)) return kExitInput;
  const double qerr = dlcz_waveform_quad_error(w.p);
  if (qerr > o.tolerance) {
    std::cerr << "error: quadrature routes disagree by " << qerr
              << " (tolerance " << o.tolerance << ")\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_scan_duration(const CommonOpts& o, const std::vector<double>& values,
                      bool optimize_power) {
  ScenarioHandle s;
  if (int rc = load_scenario(o, &s)) return rc;
  Str csv, json;
  const int rc = dlcz_scan_duration(s.p, values.data(),
                                    static_cast<int>(values.size()),
                                    optimize_power ? 1 : 0, &csv.p, &json.p);
  if (rc != DLCZ_OK && rc != DLCZ_ERR_PARTIAL_SCAN)
    return report(rc, "duration scan failed");
  if (!emit_results(o, "scan_duration", csv.p, json.p)) return kExitInput;
  if (rc == DLCZ_ERR_PARTIAL_SCAN) {
    std::cerr << "warning: " << dlcz_last_error() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_scan_delay(const CommonOpts& o, const std::vector<double>& values) {
  ScenarioHandle s;
  if (int rc = load_scenario(o, &s)) return rc;
  Str csv, json;
  const int rc = dlcz_scan_delay(s.p, values.data(),
                                 static_cast<int>(values.size()), &csv.p,
                                 &json.p);
  if (rc != DLCZ_OK && rc != DLCZ_ERR_PARTIAL_SCAN)
    return report(rc, "delay scan failed");
  if (!emit_results(o, "scan_delay", csv.p, json.p)) return kExitInput;
  if (rc == DLCZ_ERR_PARTIAL_SCAN) {
    std::cerr << "warning: " << dlcz_last_error() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_scan_power(const CommonOpts& o, double lo, double hi) {
  ScenarioHandle s;
  if (int rc = load_scenario(o, &s)) return rc;
  Str csv, json;
  if (int rc = dlcz_scan_power(s.p, lo, hi, &csv.p, &json.p))
    return report(rc, "power scan failed");
  if (!emit_results(o, "scan_power", csv.p, json.p)) return kExitInput;
  return kExitOk;
}

int cmd_g2(const CommonOpts& o) {
  std::string text;
  if (!read_file(o.config, &text)) {
    std::cerr << "error: cannot read config file " << o.config << "\n";
    return kExitInput;
  }
  Str csv, json;
  const int rc = dlcz_g2(text.c_str(), &csv.p, &json.p);
  if (rc != DLCZ_OK && rc != DLCZ_ERR_PARTIAL_SCAN)
    return report(rc, "counting-statistics run failed");
  if (!emit_results(o, "g2", csv.p, json.p)) return kExitInput;
  if (rc == DLCZ_ERR_PARTIAL_SCAN) {
    std::cerr << "warning: " << dlcz_last_error() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_reproduce_figure(const CommonOpts& o, const std::string& figure) {
  Str csv, json;
  int all_pass = 0;
  if (int rc = dlcz_reproduce_figure(figure.c_str(), &csv.p, &json.p, &all_pass))
    return report(rc, "figure run failed");
  if (!emit_results(o, "figure_" + figure, csv.p, json.p)) return kExitInput;
  if (all_pass == 0)
    std::cerr << "note: some acceptance bands did not pass; see the report\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulator of heralded photon-pair generation and shaped retrieval "
      "from an atomic-ensemble memory"};
  app.set_version_flag("--version", std::string(dlcz_version()));
  app.require_subcommand(1);

  CommonOpts opts;

  auto* c_run = app.add_subcommand(
      "run", "Compute the conditional retrieved-photon waveform");
  add_common(c_run, &opts, true);

  auto* c_validate = app.add_subcommand(
      "validate", "Parse a scenario and report its digest and regime warnings");
  add_common(c_validate, &opts, true);

  auto* c_dur = app.add_subcommand(
      "scan-duration", "Retrieval metrics versus read-pulse duration");
  add_common(c_dur, &opts, true);
  std::vector<double> dur_values{1e-7, 3e-7, 1e-6, 3e-6, 1e-5};
  c_dur->add_option("--values", dur_values,
                    "Read-pulse intensity FWHMs in seconds (comma-separated)")
      ->delimiter(',')
      ->capture_default_str();
  bool optimize_power = false;
  c_dur->add_flag("--optimize-power", optimize_power,
                  "Re-optimize the read power at every point instead of "
                  "holding the base sweep depth");

  auto* c_delay = app.add_subcommand(
      "scan-delay", "Retrieval metrics versus storage delay");
  add_common(c_delay, &opts, true);
  std::vector<double> delay_values{1.5e-7, 1e-5, 2e-5, 3e-5, 4e-5,
                                   5.315e-5, 7e-5, 9e-5, 1.2e-4, 1.5915e-4};
  c_delay->add_option("--values", delay_values,
                      "Write-peak-to-read-peak delays in seconds "
                      "(comma-separated; default mirrors the bundled "
                      "lifetime benchmark)")
      ->delimiter(',')
      ->capture_default_str();

  auto* c_power = app.add_subcommand(
      "scan-power", "Scan and optimize the retrieval efficiency over read power");
  add_common(c_power, &opts, true);
  double rabi_lo = 0.0, rabi_hi = 0.0;
  c_power->add_option("--min-rabi-bar", rabi_lo,
                      "Lower peak Rabi bound (rad/s); 0 derives it from the "
                      "read pulse")
      ->capture_default_str();
  c_power->add_option("--max-rabi-bar", rabi_hi,
                      "Upper peak Rabi bound (rad/s); 0 derives it from the "
                      "read pulse")
      ->capture_default_str();

  auto* c_g2 = app.add_subcommand(
      "g2", "Photon-counting correlation functions of the pair source");
  add_common(c_g2, &opts, true);

  auto* c_fig = app.add_subcommand(
      "reproduce-figure", "Run a bundled benchmark and check its result bands");
  add_common(c_fig, &opts, false);
  std::string figure;
  c_fig->add_option("--figure", figure,
                    "One of: fig2, fig3, fig5-rexp, fig5-timebin, figS1, figS2")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (opts.threads < 1) {
    std::cerr << "error: --threads must be >= 1\n";
    return kExitInput;
  }
  if (opts.tolerance <= 0.0) {
    std::cerr << "error: --tolerance must be positive\n";
    return kExitInput;
  }

  if (c_run->parsed()) return cmd_run(opts);
  if (c_validate->parsed()) return cmd_validate(opts);
  if (c_dur->parsed()) return cmd_scan_duration(opts, dur_values, optimize_power);
  if (c_delay->parsed()) return cmd_scan_delay(opts, delay_values);
  if (c_power->parsed()) return cmd_scan_power(opts, rabi_lo, rabi_hi);
  if (c_g2->parsed()) return cmd_g2(opts);
  if (c_fig->parsed()) return cmd_reproduce_figure(opts, figure);
  std::cerr << "error: no verb given\n";
  return kExitInput;
}
