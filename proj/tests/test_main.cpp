#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

// Test runner. Suites are selected with --test-suite=<name>; the registered
// suite names are: bessel, quadrature, pulses, model, kernels, correlators,
// solver, photon_stats, analysis.
int main(int argc, char** argv) {
  doctest::Context context(argc, argv);
  const int res = context.run();
  if (context.shouldExit()) return res;
  return res;
}
