// Acceptance gate for the retrieval simulator.
//
// Each criterion is run standalone:   acceptance --criterion N   (N in 1..9)
// The run prints its measurements as indented detail lines and finishes with
// exactly one verdict line of the form
//
//   ACCEPTANCE <n> <short-name>: PASS — measured <...> (band <...>)
//
// and the process exits 0 exactly when the criterion passed. Bands are
// pinned here, in code, so a regression cannot pass by editing a data file.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "json.hpp"

#include "dlcz/analysis.hpp"
#include "dlcz/bessel.hpp"
#include "dlcz/correlators.hpp"
#include "dlcz/model.hpp"
#include "dlcz/photon_stats.hpp"
#include "dlcz/solver.hpp"

#include "../oracles.hpp"

namespace {

using namespace dlcz;

std::string str(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

void detail(const std::string& line) { std::printf("  - %s\n", line.c_str()); }

double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

double crel(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double acc = 0.0;
  for (size_t i = 1; i < t.size(); ++i)
    acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
  return acc;
}

struct Verdict {
  bool pass = false;
  std::string measured;
  std::string band;
};

// ---------------------------------------------------------------------------
// 1. Gaussian memory decay: efficiency drops to 1/e one time constant after
//    the base delay, within +-2%.

Verdict storage_lifetime() {
  const Scenario s = preset_scenario("figS1");
  const double d0 = s.storage_delay;
  const double tau = s.ensemble.gamma_0;  // Gaussian envelope time constant
  detail(str("base delay %.3g s, memory time constant %.3g s", d0, tau));

  const ScanResult r = scan_delay(s, {d0, d0 + tau});
  Verdict v;
  if (r.n_failed != 0) {
    v.measured = "delay scan failed: " + r.points[0].error + r.points[1].error;
    v.band = "both delay points must solve";
    return v;
  }
  const double e0 = r.points[0].efficiency;
  const double e1 = r.points[1].efficiency;
  detail(str("eta(delay = %.3g s) = %.6f", d0, e0));
  detail(str("eta(delay = %.3g s) = %.6f", d0 + tau, e1));

  const double ratio = e0 > 0.0 ? e1 / e0 : 0.0;
  const double lo = std::exp(-1.0) * 0.98;
  const double hi = std::exp(-1.0) * 1.02;
  v.pass = ratio >= lo && ratio <= hi;
  v.measured = str("efficiency ratio after one time constant = %.5f", ratio);
  v.band = str("[%.5f, %.5f] (1/e within 2%%)", lo, hi);
  return v;
}

// ---------------------------------------------------------------------------
// 2. Efficiency plateau: with per-duration power optimization and no spin
//    decoherence, the retrieval efficiency is flat across a 100x duration
//    range (max/min <= 1.10).

Verdict efficiency_plateau() {
  const Scenario s = preset_scenario("fig3");
  const std::vector<double> durations = {0.1e-6, 0.3e-6, 1e-6, 3e-6, 10e-6};
  const ScanResult r = scan_duration(s, durations, /*reoptimize_power=*/true);

  Verdict v;
  double emin = 1e300, emax = 0.0;
  bool all_ok = true;
  for (const ScanPoint& p : r.points) {
    if (!p.ok) {
      all_ok = false;
      detail(str("duration %.3g s FAILED: %s", p.x, p.error.c_str()));
      continue;
    }
    detail(str("duration %.3g s: optimized power %.4g rad/s, eta = %.6f",
               p.x, p.peak_rabi_bar, p.efficiency));
    emin = std::min(emin, p.efficiency);
    emax = std::max(emax, p.efficiency);
  }
  const double ratio = (all_ok && emin > 0.0) ? emax / emin : 1e300;
  v.pass = all_ok && ratio <= 1.10;
  v.measured = str("max/min efficiency over durations 0.1-10 us = %.4f", ratio);
  v.band = "<= 1.10 with all points solved";
  return v;
}

// ---------------------------------------------------------------------------
// 3. High-optical-depth retrieval: at read optical depth 50 with a unit
//    detection chain and no decoherence, the optimized intrinsic conditional
//    efficiency reaches 0.80 +- 0.05.

Verdict od50_retrieval() {
  const Scenario s = preset_scenario("od50");
  const double lo_p = power_for_sweep_depth(s, 0.01);
  const double hi_p = power_for_sweep_depth(s, 12.0);
  const PowerOptimum opt = optimize_read_power(s, lo_p, hi_p);
  detail(str("optimized read power %.6g rad/s (bracket %.3g..%.3g)",
             opt.best_power, lo_p, hi_p));

  // Report the intrinsic (pre-fiber) efficiency at the optimum; the preset's
  // detection chain is unity so the optimizer maximized the same quantity.
  RetrievalSolver solver(with_read_power(s, opt.best_power));
  const Waveform w = solver.conditional_flux();
  detail(str("intrinsic conditional efficiency = %.6f", w.efficiency_raw));
  detail(str("fiber-coupled efficiency        = %.6f", w.efficiency));

  Verdict v;
  v.pass = w.efficiency_raw >= 0.75 && w.efficiency_raw <= 0.85;
  v.measured =
      str("intrinsic conditional efficiency = %.4f", w.efficiency_raw);
  v.band = "[0.75, 0.85]";
  return v;
}

// ---------------------------------------------------------------------------
// 4. Shape tracking: the photon width follows the drive width across
//    {0.3, 1.27, 5} us at fixed sweep depth.

Verdict shape_tracking() {
  const Scenario s = preset_scenario("fig2");
  const std::vector<double> durations = {0.3e-6, 1.27e-6, 5e-6};
  const ScanResult r = scan_duration(s, durations, /*reoptimize_power=*/false);

  Verdict v;
  bool all_ok = r.n_failed == 0;
  bool in_band = true;
  bool monotone = true;
  double prev = 0.0;
  for (const ScanPoint& p : r.points) {
    if (!p.ok) {
      detail(str("duration %.3g s FAILED: %s", p.x, p.error.c_str()));
      continue;
    }
    const double ratio = p.photon_fwhm / p.x;
    detail(str("drive fwhm %.3g s -> photon fwhm %.4g s (ratio %.3f)",
               p.x, p.photon_fwhm, ratio));
    in_band = in_band && ratio >= 0.8 && ratio <= 1.3;
    monotone = monotone && p.photon_fwhm > prev;
    prev = p.photon_fwhm;
  }
  v.pass = all_ok && in_band && monotone;
  v.measured = str("width ratios in band: %s; photon width monotone: %s",
                   in_band ? "yes" : "no", monotone ? "yes" : "no");
  v.band = "photon/drive fwhm in [0.8, 1.3] at every point, strictly rising";
  return v;
}

// ---------------------------------------------------------------------------
// 5. Nonstandard drive shapes: the rising-exponential and two-lobe read
//    pulses produce waveforms of the matching qualitative class with
//    efficiency within 30% of an equal-duration Gaussian drive.

Verdict shaped_pulses() {
  Verdict v;
  bool all = true;
  std::string classes;
  for (const char* id : {"fig5-rexp", "fig5-timebin"}) {
    const FigureResult r = reproduce_figure(id);
    const auto j = nlohmann::json::parse(r.summary_json);
    const std::string cls = j.value("shape_class", std::string("unmeasured"));
    const double ratio =
        j.contains("efficiency_vs_gaussian_reference")
            ? j["efficiency_vs_gaussian_reference"].value("value", 0.0)
            : 0.0;
    detail(str("%s: shape class \"%s\", efficiency/gaussian-reference %.3f, "
               "bands %s",
               id, cls.c_str(), ratio, r.all_bands_pass ? "pass" : "FAIL"));
    all = all && r.all_bands_pass;
    classes += std::string(id) + "=" + cls + " ";
  }
  v.pass = all;
  v.measured = str("detected classes: %s", classes.c_str());
  v.band =
      "rising-then-cutoff and double-peak detected; efficiency within 30% of "
      "the equal-duration Gaussian reference";
  return v;
}

// ---------------------------------------------------------------------------
// 6. Read-power response: a 35 ns read drive should show at least one
//    interior extremum in efficiency vs power (coherent power oscillation)
//    while a 10 us drive saturates monotonically.

Verdict rabi_oscillations() {
  const Scenario s35 = preset_scenario("figS1");  // 35 ns read drive
  auto optimize = [](const Scenario& s) {
    return optimize_read_power(s, power_for_sweep_depth(s, 0.01),
                               power_for_sweep_depth(s, 12.0));
  };

  const PowerOptimum o35 = optimize(s35);
  detail(str("35 ns drive: %d interior maxima over the coarse power scan "
             "(best eta %.4f)",
             o35.n_interior_maxima, o35.best_efficiency));
  const bool short_oscillates = o35.n_interior_maxima >= 1;

  const Scenario s10 = with_read_fwhm(s35, 10e-6);
  const PowerOptimum o10 = optimize(s10);
  const double first = o10.curve.front().efficiency;
  const double last = o10.curve.back().efficiency;
  detail(str("10 us drive: %d interior maxima; eta rises %.4f -> %.4f "
             "(best %.4f)",
             o10.n_interior_maxima, first, last, o10.best_efficiency));
  const bool long_saturates = o10.n_interior_maxima == 0 &&
                              last >= 0.98 * o10.best_efficiency &&
                              first <= 0.5 * o10.best_efficiency;

  if (!short_oscillates) {
    detail("NOTE: the short-drive oscillation is absent by construction.");
    detail("The solver linearizes retrieval and normalizes by the stored");
    detail("excitation, which makes the efficiency a function of the");
    detail("integrated sweep depth alone. A scan over peak power therefore");
    detail("traces the same saturating curve at every drive duration, and");
    detail("coherent power cycling at short durations cannot appear in this");
    detail("observable. The saturating long-drive half of the criterion is");
    detail("the part this model can and does reproduce.");
  }

  Verdict v;
  v.pass = short_oscillates && long_saturates;
  v.measured = str("35 ns interior maxima = %d; 10 us interior maxima = %d, "
                   "first/last of best = %.3f/%.3f",
                   o35.n_interior_maxima, o10.n_interior_maxima,
                   o10.best_efficiency > 0.0 ? first / o10.best_efficiency : 0.0,
                   o10.best_efficiency > 0.0 ? last / o10.best_efficiency : 0.0);
  v.band = "35 ns: >= 1 interior maximum; 10 us: none, rising to a plateau";
  return v;
}

// ---------------------------------------------------------------------------
// 7. Photon-counting statistics: thermal 1 + 1/K limits, heralded
//    autocorrelation against the Fock oracle, dark-count degradation.

Verdict photon_statistics() {
  Verdict v;

  TmsvDetectorModel th;
  th.p = 1e-3;
  th.eta_w = 0.0;  // unheralded
  th.eta_r1 = 1e-4;
  th.eta_r2 = 1e-4;
  th.K = 1;
  const double g2_k1 = g2_unconditional(th);
  th.K = 2;
  const double g2_k2 = g2_unconditional(th);
  detail(str("unconditional g2: K=1 -> %.9f, K=2 -> %.9f", g2_k1, g2_k2));
  const bool thermal_ok =
      std::abs(g2_k1 - 2.0) <= 1e-6 && std::abs(g2_k2 - 1.5) <= 1e-6;

  TmsvDetectorModel m;
  m.p = 0.01;
  m.K = 1;
  m.eta_w = 0.086;
  m.eta_r1 = 0.35;
  m.eta_r2 = 0.35;
  const double g2c = g2_conditional(m);
  const double oracle = testing_oracles::fock_g2_conditional(m);
  detail(str("heralded g2(p=0.01) = %.12f, Fock oracle %.12f, |diff| %.2e",
             g2c, oracle, std::abs(g2c - oracle)));
  const bool heralded_ok =
      std::abs(g2c - oracle) <= 1e-8 && g2c >= 0.03 && g2c <= 0.05;

  bool rising = true;
  double prev = 0.0;
  for (double gate : {1e-6, 5e-6, 10e-6, 20e-6, 30e-6}) {
    TmsvDetectorModel d = m;
    d.p = 0.0025;
    const double dark = dark_probability(130.0, gate);
    d.dark_w = d.dark_r1 = d.dark_r2 = dark;
    const double g = g2_conditional(d);
    detail(str("gate %5.3g s (dark prob %.3g): heralded g2 = %.6f", gate,
               dark, g));
    rising = rising && g > prev;
    prev = g;
  }

  v.pass = thermal_ok && heralded_ok && rising;
  v.measured = str("thermal limits %s; Fock-oracle agreement %s; dark-count "
                   "curve rising %s",
                   thermal_ok ? "ok" : "FAIL", heralded_ok ? "ok" : "FAIL",
                   rising ? "yes" : "no");
  v.band = "|g2-2|,|g2-1.5| <= 1e-6; |g2c-oracle| <= 1e-8 with g2c in "
           "[0.03, 0.05]; strictly rising vs gate width";
  return v;
}

// ---------------------------------------------------------------------------
// 8. Structural pairing census: the conditioned fourth moment expands into
//    exactly 12 nonzero pairing orbits, 3 of them noise-noise.

Verdict pairing_structure() {
  const Scenario s = preset_scenario("figS1");
  const RetrievalSolver solver(s);
  const WriteKernelContext& wctx = solver.write_ctx();
  const ReadKernelContext& rctx = solver.read_ctx();

  const double t_i = 0.55 * s.xi();
  const double t = s.read_pulse.peak_time();
  const FieldExpansion Ew = expand_write_field(wctx, t_i);
  const FieldExpansion Er = expand_read_field(s, wctx, rctx, t);

  const MomentRules rules = moment_rules_for(s, wctx);
  MomentOptions opts;
  opts.panels = 2;
  opts.estimate_error = false;
  const MomentResult m =
      wick_fourth_moment(Ew.dagger(), Er.dagger(), Er, Ew, rules, opts);

  detail(str("pairing orbits with nonzero weight: %d", m.n_pairings));
  detail(str("noise-noise four-point orbits: %d", m.n_noise_pairs));
  detail(str("engine moment %.6e, production integrand %.6e (rel %.2e)",
             m.value.real(), solver.numerator_M(t, t_i),
             rel(m.value.real(), solver.numerator_M(t, t_i))));

  Verdict v;
  v.pass = m.n_pairings == 12 && m.n_noise_pairs == 3;
  v.measured = str("%d pairings, %d noise-noise", m.n_pairings,
                   m.n_noise_pairs);
  v.band = "exactly 12 pairings, exactly 3 noise-noise";
  return v;
}

// ---------------------------------------------------------------------------
// 9. Numerical consistency: pairing engine vs direct Gaussian-moment
//    formula, Bessel evaluation vs power series, grid-doubling stability,
//    and flux-integral/efficiency agreement on every bundled scenario.

Verdict numerics_consistency() {
  // a. Fourth-moment engine against the direct three-pairing formula.
  double worst_wick = 0.0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    const testing_oracles::IsserlisCase cse =
        testing_oracles::make_isserlis_case(seed);
    const MomentResult m = wick_fourth_moment(cse.x[0], cse.x[1], cse.x[2],
                                              cse.x[3], cse.rules, cse.opts);
    worst_wick = std::max(worst_wick, crel(m.value, cse.direct));
  }
  detail(str("pairing engine vs direct formula, 100 random cases: worst rel "
             "%.3e",
             worst_wick));
  const bool wick_ok = worst_wick <= 1e-12;

  // b. Bessel evaluation against the long-double power series.
  double worst_bessel = 0.0;
  for (double x : {1e-8, 1e-3, 0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 14.0, 14.9,
                   15.0, 15.1, 16.0, 20.0, 25.0, 30.0}) {
    worst_bessel = std::max(
        worst_bessel,
        rel(bessel_i0(x),
            static_cast<double>(testing_oracles::bessel_i0_series(x))));
    worst_bessel = std::max(
        worst_bessel,
        rel(bessel_i1(x),
            static_cast<double>(testing_oracles::bessel_i1_series(x))));
  }
  detail(str("bessel vs series across the branch switch: worst rel %.3e",
             worst_bessel));
  const bool bessel_ok = worst_bessel <= 1e-10;

  // c + d. Every bundled scenario: refine the grids 2x and compare; check
  // the sampled flux integral against the adaptive efficiency route.
  bool grids_ok = true;
  bool flux_ok = true;
  double worst_grid = 0.0, worst_flux = 0.0;
  for (const std::string& id : preset_ids()) {
    Scenario s = preset_scenario(id);
    RetrievalSolver coarse(s);
    const Waveform w1 = coarse.conditional_flux();
    s.grids.refine = 2.0;
    RetrievalSolver fine(s);
    const Waveform w2 = fine.conditional_flux();

    const double grid_dev = rel(w1.efficiency, w2.efficiency);
    const double flux_dev1 =
        std::abs(trapezoid(w1.t, w1.flux) - w1.efficiency) / w1.efficiency;
    const double flux_dev2 =
        std::abs(trapezoid(w2.t, w2.flux) - w2.efficiency) / w2.efficiency;
    detail(str("%-12s eta %.6f | refine x2 %.6f (rel %.2e) | flux-integral "
               "dev %.2e / %.2e",
               id.c_str(), w1.efficiency, w2.efficiency, grid_dev, flux_dev1,
               flux_dev2));
    worst_grid = std::max(worst_grid, grid_dev);
    worst_flux = std::max({worst_flux, flux_dev1, flux_dev2});
    grids_ok = grids_ok && grid_dev < 1e-3;
    flux_ok = flux_ok && flux_dev1 <= 1e-3 && flux_dev2 <= 1e-3;
  }

  Verdict v;
  v.pass = wick_ok && bessel_ok && grids_ok && flux_ok;
  v.measured = str("worst: pairing %.1e, bessel %.1e, grid-doubling %.1e, "
                   "flux-integral %.1e",
                   worst_wick, worst_bessel, worst_grid, worst_flux);
  v.band = "pairing <= 1e-12; bessel <= 1e-10; grid doubling < 1e-3; "
           "flux integral <= 1e-3";
  return v;
}

struct Criterion {
  const char* name;
  Verdict (*run)();
};

const Criterion kCriteria[9] = {
    {"storage-lifetime", storage_lifetime},
    {"efficiency-plateau", efficiency_plateau},
    {"od50-retrieval", od50_retrieval},
    {"shape-tracking", shape_tracking},
    {"shaped-pulses", shaped_pulses},
    {"rabi-oscillations", rabi_oscillations},
    {"photon-statistics", photon_statistics},
    {"pairing-structure", pairing_structure},
    {"numerics-consistency", numerics_consistency},
};

} // namespace

int main(int argc, char** argv) {
  int n = 0;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0) n = std::atoi(argv[i + 1]);
  if (n < 1 || n > 9) {
    std::fprintf(stderr, "usage: %s --criterion N   (N in 1..9)\n", argv[0]);
    return 2;
  }
  const Criterion& c = kCriteria[n - 1];
  std::printf("criterion %d (%s)\n", n, c.name);
  Verdict v;
  try {
    v = c.run();
  } catch (const std::exception& e) {
    v.pass = false;
    v.measured = str("unhandled exception: %s", e.what());
    v.band = "criterion must run to completion";
  }
  std::printf("ACCEPTANCE %d %s: %s — measured %s (band %s)\n", n, c.name,
              v.pass ? "PASS" : "FAIL", v.measured.c_str(), v.band.c_str());
  return v.pass ? 0 : 1;
}
