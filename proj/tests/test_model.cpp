#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "dlcz/model.hpp"
#include "oracles.hpp"

using namespace dlcz;
using namespace testing_oracles;

namespace {

const char* kMinimalConfig = R"json({
  "schema_version": 1,
  "ensemble": {
    "d_w": 7.5,
    "d_r": 5.0,
    "delta": "-40 MHz",
    "spin_decay": {"mode": "exponential", "gamma_0": "0 1/s"}
  },
  "write_pulse": {"family": "gaussian", "peak_rabi": "25.1 MHz", "fwhm": "15 ns"},
  "read_pulse": {"family": "gaussian", "peak_rabi": "23.5 MHz", "fwhm": "35 ns"},
  "storage_delay": "150 ns"
})json";

constexpr double kTwoPi = 6.283185307179586;

}  // namespace

TEST_SUITE("model") {

TEST_CASE("minimal config: defaults, units, and normalization") {
  const Scenario s = load_scenario(kMinimalConfig);

  // Optical depths are stored halved (barred convention).
  CHECK(s.ensemble.d_w_bar == doctest::Approx(3.75).epsilon(1e-14));
  CHECK(s.ensemble.d_r_bar == doctest::Approx(2.5).epsilon(1e-14));
  // Hz-family frequencies pick up 2 pi.
  CHECK_NEAR_REL(s.ensemble.delta, -kTwoPi * 40e6, 1e-13);
  CHECK_NEAR_REL(s.write_pulse.peak_rabi_bar, kTwoPi * 25.1e6 / 2.0, 1e-13);
  CHECK_NEAR_REL(s.read_pulse.peak_rabi_bar, kTwoPi * 23.5e6 / 2.0, 1e-13);
  // Default transition linewidths.
  CHECK_NEAR_REL(s.ensemble.gamma_es, kTwoPi * 3.03e6, 1e-13);
  CHECK_NEAR_REL(s.ensemble.gamma_eg, kTwoPi * 3.03e6, 1e-13);
  CHECK(s.ensemble.length_L == doctest::Approx(0.01));

  // The write support is translated to start at t = 0 and the read peak sits
  // one storage delay after the write peak.
  CHECK(s.write_pulse.t_start == doctest::Approx(0.0).epsilon(1e-30));
  CHECK_NEAR_REL(s.read_pulse.peak_time() - s.write_pulse.peak_time(), 150e-9,
                 1e-12);
  CHECK(s.storage_delay == doctest::Approx(150e-9).epsilon(1e-12));

  // Detection defaults to a unit chain.
  CHECK(s.detection.eta_fiber == 1.0);
  CHECK(s.detection.eta_filter == 1.0);
  CHECK(s.detection.eta_det == 1.0);
  CHECK(s.detection.dark_rate == 0.0);
}

TEST_CASE("equivalent spellings produce identical scenarios") {
  // Barred keys given directly, angular-unit overrides, bare-number times.
  const std::string alt = R"json({
    "schema_version": 1,
    "ensemble": {
      "d_w_bar": 3.75,
      "d_r_bar": 2.5,
      "delta": {"value": -251327412.28718343, "unit": "rad/s"},
      "spin_decay": {"mode": "exponential", "gamma_0": "0 1/s"}
    },
    "write_pulse": {"family": "gaussian",
                    "peak_rabi_bar": {"value": 78853975.605103806, "unit": "rad/s"},
                    "fwhm": "0.015 us"},
    "read_pulse": {"family": "gaussian", "peak_rabi": "23500 kHz", "fwhm": "35 ns"},
    "storage_delay": "0.15 us"
  })json";
  const Scenario a = load_scenario(kMinimalConfig);
  const Scenario b = load_scenario(alt);
  CHECK_NEAR_REL(a.ensemble.delta, b.ensemble.delta, 1e-12);
  CHECK_NEAR_REL(a.write_pulse.peak_rabi_bar, b.write_pulse.peak_rabi_bar, 1e-12);
  CHECK(a.read_pulse.peak_rabi_bar == b.read_pulse.peak_rabi_bar);
  CHECK(a.ensemble.d_w_bar == b.ensemble.d_w_bar);
  // "0.15 us" and "150 ns" may differ by one ulp after unit conversion.
  CHECK_NEAR_REL(a.storage_delay, b.storage_delay, 1e-14);
}

TEST_CASE("canonical serialization round-trips every bundled scenario") {
  // Uses the analysis-module preset table indirectly through files would
  // couple suites; here we rely on serialize/load being mutually inverse.
  const Scenario s = load_scenario(kMinimalConfig);
  const std::string canon = serialize_scenario(s);
  const Scenario back = load_scenario(canon);
  CHECK(back == s);
  CHECK(scenario_hash(back) == scenario_hash(s));
  // Serialization is stable: a second pass is byte-identical.
  CHECK(serialize_scenario(back) == canon);
}

TEST_CASE("hash is sensitive to physics and blind to comments") {
  const Scenario a = load_scenario(kMinimalConfig);
  std::string commented(kMinimalConfig);
  commented.insert(commented.rfind('}'), ",\n  \"_note\": \"ignored\"\n");
  const Scenario b = load_scenario(commented);
  CHECK(a == b);
  CHECK(scenario_hash(a) == scenario_hash(b));

  std::string changed(kMinimalConfig);
  const size_t pos = changed.find("150 ns");
  REQUIRE(pos != std::string::npos);
  changed.replace(pos, 6, "151 ns");
  const Scenario c = load_scenario(changed);
  CHECK(scenario_hash(c) != scenario_hash(a));
  CHECK(scenario_hash(a).size() == 16);
}

TEST_CASE("missing and unknown fields are reported by name") {
  CHECK_THROWS_WITH_AS(load_scenario(R"({"schema_version": 1})"),
                       doctest::Contains("storage_delay"),
                       std::invalid_argument);
  std::string unknown(kMinimalConfig);
  unknown.insert(unknown.rfind('}'), ",\n  \"bogus_key\": 1\n");
  CHECK_THROWS_WITH_AS(load_scenario(unknown), doctest::Contains("bogus_key"),
                       std::invalid_argument);
  CHECK_THROWS_AS(load_scenario("{ not json"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      load_scenario(std::string(kMinimalConfig).replace(
          std::string(kMinimalConfig).find("schema_version\": 1"),
          std::string("schema_version\": 1").size(), "schema_version\": 2")),
      doctest::Contains("schema_version"), std::invalid_argument);
}

TEST_CASE("unit strings are validated") {
  std::string bad(kMinimalConfig);
  const size_t pos = bad.find("-40 MHz");
  bad.replace(pos, 7, "-40 parsec");
  CHECK_THROWS_AS(load_scenario(bad), std::invalid_argument);

  // A rate field rejects a frequency that implies an angular factor mismatch.
  std::string cfg(kMinimalConfig);
  const size_t sd = cfg.find("\"0 1/s\"");
  REQUIRE(sd != std::string::npos);
  cfg.replace(sd, 7, "\"1 kHz\"");
  const Scenario s = load_scenario(cfg);
  // Rates are plain 1/s quantities: no 2 pi.
  CHECK_NEAR_REL(s.ensemble.gamma_0, 1000.0, 1e-13);
}

TEST_CASE("spin decay modes") {
  // Gaussian mode stores a time constant and demands it be positive.
  std::string gauss(kMinimalConfig);
  const size_t pos = gauss.find(R"({"mode": "exponential", "gamma_0": "0 1/s"})");
  REQUIRE(pos != std::string::npos);
  gauss.replace(pos, std::string(R"({"mode": "exponential", "gamma_0": "0 1/s"})").size(),
                R"({"mode": "gaussian", "gamma_0": "53 us"})");
  const Scenario s = load_scenario(gauss);
  CHECK(s.ensemble.spin_decay_mode == EnsembleParams::SpinDecay::Gaussian);
  CHECK_NEAR_REL(s.ensemble.gamma_0, 53e-6, 1e-13);
  // Amplitude decay at t equal to the time constant: exp(-1/2).
  CHECK_NEAR_REL(s.retrieval_decay(53e-6), std::exp(-0.5), 1e-12);

  std::string gauss0 = gauss;
  const size_t g0 = gauss0.find("53 us");
  gauss0.replace(g0, 5, "0 us");
  CHECK_THROWS_AS(load_scenario(gauss0), std::invalid_argument);

  // Exponential mode: amplitude decays from the write-window end.
  const Scenario e = load_scenario(kMinimalConfig);
  CHECK(e.ensemble.spin_decay_mode == EnsembleParams::SpinDecay::Exponential);
  CHECK(e.retrieval_decay(e.xi() + 1e-6) == doctest::Approx(1.0));  // rate 0
}

TEST_CASE("derived ensemble quantities") {
  const Scenario s = load_scenario(kMinimalConfig);
  CHECK_NEAR_REL(s.ensemble.g2N(),
                 s.ensemble.d_r_bar * s.ensemble.gamma_eg * s.ensemble.c /
                     s.ensemble.length_L,
                 1e-15);
  CHECK(s.xi() == s.write_pulse.t_end);
  CHECK(s.read_start() == s.read_pulse.t_start);
  CHECK(s.read_end() == s.read_pulse.t_end + s.grids.guard);
}

TEST_CASE("regime validation emits structured warnings") {
  // The base geometry violates the adiabatic-gain condition softly.
  const Scenario s = load_scenario(kMinimalConfig);
  const std::vector<Warning> soft = validate_regime(s);
  REQUIRE(!soft.empty());
  CHECK(soft[0].name == "write_adiabatic_gain");
  CHECK(soft[0].severity == Warning::Severity::Soft);
  CHECK(soft[0].measured > soft[0].threshold);

  // Driving nearly on resonance breaks the far-detuned elimination hard.
  std::string near_res(kMinimalConfig);
  const size_t pos = near_res.find("-40 MHz");
  near_res.replace(pos, 7, "-2 MHz");
  bool has_hard = false;
  for (const Warning& x : validate_regime(load_scenario(near_res))) {
    CHECK(!x.name.empty());
    CHECK(!x.message.empty());
    if (x.name == "write_detuning") has_hard = x.severity == Warning::Severity::Hard;
  }
  CHECK(has_hard);

  const std::string j = warnings_to_json(soft);
  CHECK(j.find("severity") != std::string::npos);
  CHECK(j.find("measured") != std::string::npos);

  // A gentle configuration (smaller write optical depth) warns about nothing.
  std::string weak(kMinimalConfig);
  const size_t dw = weak.find("\"d_w\": 7.5");
  weak.replace(dw, std::string("\"d_w\": 7.5").size(), "\"d_w\": 3.0");
  CHECK(validate_regime(load_scenario(weak)).empty());
}

TEST_CASE("scenario validation rejects inconsistent physics") {
  std::string zero_delta(kMinimalConfig);
  const size_t pos = zero_delta.find("-40 MHz");
  zero_delta.replace(pos, 7, "0 MHz");
  CHECK_THROWS_AS(load_scenario(zero_delta), std::invalid_argument);

  std::string neg_delay(kMinimalConfig);
  const size_t sd = neg_delay.find("150 ns");
  neg_delay.replace(sd, 6, "-150 ns");
  CHECK_THROWS_AS(load_scenario(neg_delay), std::invalid_argument);
}

}  // TEST_SUITE
