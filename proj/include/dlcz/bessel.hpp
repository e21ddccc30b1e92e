#pragma once

namespace dlcz {

// Modified Bessel functions of the first kind, orders 0 and 1.
// Power series below x = 15, Hankel-type asymptotic expansion above.
// All functions throw std::domain_error on negative or non-finite input.
double bessel_i0(double x);
double bessel_i1(double x);

// Exponentially scaled variants e^{-x} I_n(x); stay finite up to x = 1e6.
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

// 2*I1(x)/x, an entire function equal to 1 at x = 0. Removable-singularity
// form used by the gain kernels so coincident arguments need no branching.
double bessel_i1_over_half_x(double x);

} // namespace dlcz
