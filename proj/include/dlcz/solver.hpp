#pragma once

// Production solver for the heralded retrieval observables.
//
// The generic pairing engine (correlators.hpp) evaluates the same moments by
// brute-force nested quadrature; it is the independent cross-check. This
// module instead reduces the fourth moment that conditions the retrieved
// field on a write-photon detection,
//
//   M(t, t_i) = < Ew+(L,t_i) Er+(0,t) Er(0,t) Ew(L,t_i) >
//             = |A(t, t_i)|^2 + Phi(t_i) * Ir(t),
//
// to a small set of tabulated one-dimensional profiles and evaluates the
// conditional flux
//
//   n(t) = (c/L) * [ Int M(t, t_i) dt_i / Int Phi(t_i) dt_i ] * eta_fiber
//
// on a read-window grid. A is the pair amplitude (write photon at t_i,
// retrieved photon at t), Phi the unconditional write emission density and
// Ir the unconditional retrieved-field intensity; the cross pairing route
// vanishes identically because the retrieved field carries no component of
// the incoming write-vacuum mode.

#include <complex>
#include <string>
#include <vector>

#include "dlcz/kernels.hpp"
#include "dlcz/model.hpp"
#include "dlcz/quadrature.hpp"

namespace dlcz {

// Conditional retrieved waveform on the read window.
struct Waveform {
  std::vector<double> t;    // absolute time (s), write-window origin
  std::vector<double> flux; // conditional in-fiber flux (1/s) at t

  double efficiency = 0.0;     // integral of the in-fiber flux (quadrature route)
  double efficiency_raw = 0.0; // same before fiber coupling
  double write_prob = 0.0;     // (c/L) * Int Phi dt_i: write emission probability
  double quad_error = 0.0;     // |grid-route - quadrature-route| / quadrature-route
  bool low_accuracy = false;   // retrieval window exceeded the medium length
  bool degenerate = false;     // write emission vanished; flux is identically 0
  std::vector<std::string> warnings;
};

class RetrievalSolver {
public:
  explicit RetrievalSolver(const Scenario& scn);

  RetrievalSolver(const RetrievalSolver&) = delete;
  RetrievalSolver& operator=(const RetrievalSolver&) = delete;

  // Conditional in-fiber flux sampled on the read-window output grid.
  Waveform conditional_flux() const;

  // Window integral of the conditional flux by adaptive panel quadrature,
  // independent of the output grid (in-fiber, i.e. times eta_fiber).
  double conditional_efficiency() const;

  // --- diagnostic / cross-check surface ---------------------------------

  // Unconditional write emission density at t_i (dimensionless).
  double Phi(double t_i) const;
  // (c/L) * Int_0^xi Phi(t_i) dt_i.
  double write_emission_probability() const;
  // Unconditional retrieved-field intensity at t (dimensionless).
  double Ir(double t) const;
  // Pair amplitude; |A|^2 is the coherent part of the fourth moment.
  std::complex<double> A(double t, double t_i) const;
  // Full fourth-moment integrand |A|^2 + Phi * Ir.
  double numerator_M(double t, double t_i) const;
  // Conditional in-fiber flux at a single time (fresh evaluation).
  double conditional_flux_at(double t) const;
  // Collective spin excitation number (1/L) Int <S+ S> dz at time t within
  // the write window.
  double spin_population(double t) const;
  // Gain-line integral Int_0^1 I0(2 sqrt(beta x))^2 dx, spline route and
  // direct quadrature route.
  double W_lookup(double beta) const;
  static double W_direct(double beta);

  const Scenario& scenario() const { return scn_; }
  const WriteKernelContext& write_ctx() const { return wctx_; }
  const ReadKernelContext& read_ctx() const { return rctx_; }

private:
  struct TiNode {
    double t = 0.0;      // write-window time
    double w = 0.0;      // quadrature weight
    double chi = 0.0;    // write coupling chi(t_i)
    double phi = 0.0;    // Phi(t_i)
    CubicSpline c_re;    // conditioned spin profile C(u; t_i), real part
    CubicSpline c_im;    // imaginary part
  };

  void build_w_table();
  void build_ti_nodes();
  // C(u; t_i) on the u-grid: the spin profile left by a write photon at t_i,
  // dressed by the decay/noise history up to the end of the write window.
  void conditioned_profile(double t_i, std::vector<std::complex<double>>& out) const;
  // B(u; t_i, s): retrieval-ready profile created at noise time s.
  void emission_profile(double g_ti_minus_gs, double g_xi_minus_gs,
                        std::vector<double>& out) const;
  // Integral of f against the retrieval window of time t (normalized
  // Gaussian acceptance in u, clipped to the medium).
  std::complex<double> window_integral(
      double t, const std::function<std::complex<double>(double)>& f) const;
  double phi_value(double t_i) const;
  std::complex<double> a_from_node(double t, const TiNode& node) const;
  double flux_core(double t, bool* low_accuracy) const; // (c/L)(NA/Dw + Ir), no eta
  // Gauss-Legendre nodes covering the active part of [0, t_hi] where the
  // write scattering rate gamma_S is nonzero.
  void gamma_nodes(double t_hi, int n_target,
                   std::vector<std::pair<double, double>>& nodes_weights) const;

  Scenario scn_;
  WriteKernelContext wctx_;
  ReadKernelContext rctx_;

  std::vector<double> u_grid_;
  CubicSpline w_log_;   // log W as a function of sqrt(beta)
  double w_theta_max_ = 0.0;
  std::vector<TiNode> ti_nodes_;
  double dw_ = 0.0;     // Int Phi dt_i

  // write-support quadrature nodes for Ir's history integral:
  // (s, weight * chi(s)^2 * exp(-2 Re[Gamma(xi)-Gamma(s)]), g(xi)-g(s))
  struct IrNode {
    double s = 0.0, w = 0.0, g_diff = 0.0;
  };
  std::vector<IrNode> ir_nodes_;
};

} // namespace dlcz
