#include "dlcz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dlcz/bessel.hpp"

namespace dlcz {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kDegenerateDw = 1e-30;

const Scenario& validated(const Scenario& s) {
  s.validate();
  return s;
}

// Merges segment edges: {lo, hi} plus interior breakpoints, deduplicated.
std::vector<double> segment_edges(double lo, double hi, const std::vector<double>& breaks) {
  std::vector<double> e{lo, hi};
  const double tol = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  for (double b : breaks)
    if (b > lo + tol && b < hi - tol) e.push_back(b);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end(),
                      [tol](double a, double b) { return std::abs(a - b) <= tol; }),
          e.end());
  return e;
}

void profile_to_splines(const std::vector<double>& u, const std::vector<cplx>& c,
                        CubicSpline& re, CubicSpline& im) {
  std::vector<double> yr(u.size()), yi(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    yr[i] = c[i].real();
    yi[i] = c[i].imag();
  }
  re = CubicSpline(u, yr);
  im = CubicSpline(u, yi);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (size_t i = 1; i < x.size(); ++i)
    acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return acc;
}

} // namespace

RetrievalSolver::RetrievalSolver(const Scenario& scn)
    : scn_(validated(scn)),
      wctx_(scn_.ensemble, scn_.write_pulse, scn_.xi(), scn_.grids),
      rctx_(scn_.ensemble, scn_.read_pulse, scn_.xi(), scn_.read_end(), scn_.grids) {
  const double L = scn_.ensemble.length_L;
  const int nu = std::max(17, static_cast<int>(std::lround(scn_.grids.n_u * scn_.grids.refine)) + 1);
  u_grid_.resize(nu);
  for (int i = 0; i < nu; ++i) u_grid_[i] = L * i / (nu - 1);

  build_w_table();
  build_ti_nodes();

  // History nodes of the unconditional retrieved intensity: weight carries
  // chi^2(s) exp(-2 Re[Gamma(xi) - Gamma(s)]).
  const double xi = scn_.xi();
  std::vector<std::pair<double, double>> nw;
  gamma_nodes(xi, std::max(16, static_cast<int>(std::lround(scn_.grids.n_s * scn_.grids.refine))),
              nw);
  const double gre_xi = wctx_.Gamma_re(xi);
  const double g_xi = wctx_.g(xi);
  ir_nodes_.reserve(nw.size());
  for (const auto& [s, w] : nw) {
    const double c2 = wctx_.chi_sq(s);
    if (c2 == 0.0) continue;
    IrNode n;
    n.s = s;
    n.w = w * c2 * std::exp(-2.0 * (gre_xi - wctx_.Gamma_re(s)));
    n.g_diff = g_xi - wctx_.g(s);
    ir_nodes_.push_back(n);
  }
}

double RetrievalSolver::W_direct(double beta) {
  if (!(beta > 0.0)) return 1.0;
  const double th = std::sqrt(beta);
  // x = y^2 turns the sqrt kink into a smooth integrand. Scaled Bessel
  // factors keep intermediate values bounded until the final exp; the
  // result itself overflows only beyond beta ~ 3.1e4 (gain e^{4 sqrt(beta)}).
  QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  spec.max_levels = 14;
  const QuadResult r = integrate_1d(
      std::function<double(double)>([th](double y) {
        const double w = 2.0 * th * y;
        const double s = bessel_i0_scaled(w);
        return 2.0 * y * s * s * std::exp(2.0 * w);
      }),
      0.0, 1.0, spec);
  return r.value.real();
}

double RetrievalSolver::W_lookup(double beta) const {
  if (!(beta > 0.0)) return 1.0;
  const double th = std::sqrt(beta);
  return std::exp(w_log_.eval(th)); // eval clamps at w_theta_max_
}

void RetrievalSolver::build_w_table() {
  const double L = scn_.ensemble.length_L, c = scn_.ensemble.c;
  const double beta_max = std::max(0.0, wctx_.g_end() * L / c);
  if (beta_max > 2.5e4)
    throw std::invalid_argument("write gain exceeds the numeric range of the gain-line table");
  w_theta_max_ = std::max(1e-3, std::sqrt(beta_max) * 1.02);
  const int n = 257;
  std::vector<double> th(n), lv(n);
  for (int i = 0; i < n; ++i) {
    th[i] = w_theta_max_ * i / (n - 1);
    lv[i] = std::log(W_direct(th[i] * th[i]));
  }
  w_log_ = CubicSpline(std::move(th), std::move(lv));
}

void RetrievalSolver::gamma_nodes(double t_hi, int n_target,
                                  std::vector<std::pair<double, double>>& nodes_weights) const {
  nodes_weights.clear();
  if (!(t_hi > 0.0)) return;
  const std::vector<double> edges = segment_edges(0.0, t_hi, scn_.write_pulse.breakpoints());
  const double total = t_hi;
  std::vector<double> xs, ws;
  for (size_t k = 0; k + 1 < edges.size(); ++k) {
    const double len = edges[k + 1] - edges[k];
    const int panels =
        std::max(1, static_cast<int>(std::lround(n_target / 16.0 * len / total)));
    xs.clear();
    ws.clear();
    gl_nodes(edges[k], edges[k + 1], panels, xs, ws);
    for (size_t i = 0; i < xs.size(); ++i) nodes_weights.emplace_back(xs[i], ws[i]);
  }
}

void RetrievalSolver::build_ti_nodes() {
  const double xi = scn_.xi();
  std::vector<std::pair<double, double>> nw;
  gamma_nodes(xi, std::max(32, static_cast<int>(std::lround(scn_.grids.n_ti * scn_.grids.refine))),
              nw);
  ti_nodes_.resize(nw.size());
  std::vector<cplx> prof;
  dw_ = 0.0;
  for (size_t i = 0; i < nw.size(); ++i) {
    TiNode& nd = ti_nodes_[i];
    nd.t = nw[i].first;
    nd.w = nw[i].second;
    nd.chi = wctx_.chi(nd.t);
    nd.phi = phi_value(nd.t);
    dw_ += nd.w * nd.phi;
    conditioned_profile(nd.t, prof);
    profile_to_splines(u_grid_, prof, nd.c_re, nd.c_im);
  }
}

double RetrievalSolver::phi_value(double t_i) const {
  const double chi = wctx_.chi(t_i);
  if (chi == 0.0) return 0.0;
  const double L = scn_.ensemble.length_L, c = scn_.ensemble.c;
  const double g_ti = wctx_.g(t_i);
  const double gre_ti = wctx_.Gamma_re(t_i);
  double acc = std::exp(-2.0 * gre_ti) * W_lookup(g_ti * L / c);
  std::vector<std::pair<double, double>> nw;
  gamma_nodes(t_i, std::max(16, static_cast<int>(std::lround(scn_.grids.n_s * scn_.grids.refine))),
              nw);
  for (const auto& [s, w] : nw) {
    const double gs = wctx_.gamma_S(s);
    if (gs == 0.0) continue;
    acc += w * 2.0 * gs * std::exp(-2.0 * (gre_ti - wctx_.Gamma_re(s))) *
           W_lookup((g_ti - wctx_.g(s)) * L / c);
  }
  return chi * chi * L * L / (c * c) * acc;
}

double RetrievalSolver::Phi(double t_i) const { return phi_value(t_i); }

double RetrievalSolver::write_emission_probability() const {
  return scn_.ensemble.c / scn_.ensemble.length_L * dw_;
}

void RetrievalSolver::emission_profile(double g_ti_minus_gs, double g_xi_minus_gs,
                                       std::vector<double>& out) const {
  const double L = scn_.ensemble.length_L, c = scn_.ensemble.c;
  const size_t nu = u_grid_.size();
  out.resize(nu);
  const int nv = std::max(8, static_cast<int>(std::lround(scn_.grids.n_v * scn_.grids.refine)));
  const int v_panels = std::max(1, nv / 16);
  const double a = std::max(0.0, g_ti_minus_gs);
  const double bg = std::max(0.0, g_xi_minus_gs);
  for (size_t i = 0; i < nu; ++i) {
    const double u = u_grid_[i];
    double val = kernel_H(a, L - u, c);
    if (u > 0.0 && bg > 0.0) {
      val += gl_panels(
          [a, bg, u, L, c](double v) {
            return kernel_Gs(bg, u - v, c) * kernel_H(a, L - v, c);
          },
          0.0, u, v_panels);
    }
    out[i] = val;
  }
}

void RetrievalSolver::conditioned_profile(double t_i, std::vector<cplx>& out) const {
  const size_t nu = u_grid_.size();
  out.assign(nu, cplx{});
  const double xi = scn_.xi();
  const cplx g_xi_conj = std::conj(wctx_.Gamma(xi));
  const cplx g_ti = wctx_.Gamma(t_i);
  std::vector<double> b;

  emission_profile(wctx_.g(t_i), wctx_.g(xi), b);
  const cplx c0 = std::exp(-(g_xi_conj + g_ti));
  for (size_t i = 0; i < nu; ++i) out[i] += c0 * b[i];

  std::vector<std::pair<double, double>> nw;
  gamma_nodes(t_i, std::max(16, static_cast<int>(std::lround(scn_.grids.n_s * scn_.grids.refine))),
              nw);
  for (const auto& [s, w] : nw) {
    const double gs = wctx_.gamma_S(s);
    if (gs == 0.0) continue;
    emission_profile(wctx_.g(t_i) - wctx_.g(s), wctx_.g(xi) - wctx_.g(s), b);
    const cplx gamma_s = wctx_.Gamma(s);
    const cplx cs = w * 2.0 * gs *
                    std::exp(-(g_xi_conj - std::conj(gamma_s)) - (g_ti - gamma_s));
    for (size_t i = 0; i < nu; ++i) out[i] += cs * b[i];
  }
}

cplx RetrievalSolver::window_integral(double t, const std::function<cplx(double)>& f) const {
  const double uc = rctx_.u_c(t), dl = rctx_.delta_l(t);
  if (!(dl > 0.0)) return {};
  const double L = scn_.ensemble.length_L;
  const double xlo = std::max(-8.0, (0.0 - uc) / dl);
  const double xhi = std::min(8.0, (L - uc) / dl);
  if (!(xhi > xlo)) return {};
  static constexpr double kEdges[7] = {-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0};
  cplx acc{};
  for (int k = 0; k < 6; ++k) {
    const double a = std::max(xlo, kEdges[k]);
    const double b = std::min(xhi, kEdges[k + 1]);
    if (!(b > a)) continue;
    acc += gl16c([&f, uc, dl](double x) { return f(uc + x * dl) * std::exp(-0.5 * x * x); }, a,
                 b);
  }
  return acc / kSqrt2Pi;
}

cplx RetrievalSolver::a_from_node(double t, const TiNode& nd) const {
  const double p = rctx_.P(t);
  if (p == 0.0 || nd.chi == 0.0) return {};
  const double d = scn_.retrieval_decay(t);
  const cplx psi = window_integral(
      t, [&nd](double u) { return cplx(nd.c_re.eval(u), nd.c_im.eval(u)); });
  const double L = scn_.ensemble.length_L, c = scn_.ensemble.c;
  return cplx(0.0, -1.0) * (p * d * nd.chi * L / c) * psi;
}

cplx RetrievalSolver::A(double t, double t_i) const {
  TiNode nd;
  nd.t = t_i;
  nd.chi = wctx_.chi(t_i);
  if (nd.chi == 0.0) return {};
  std::vector<cplx> prof;
  conditioned_profile(t_i, prof);
  profile_to_splines(u_grid_, prof, nd.c_re, nd.c_im);
  return a_from_node(t, nd);
}

double RetrievalSolver::Ir(double t) const {
  const double p = rctx_.P(t);
  if (p == 0.0) return 0.0;
  const double d = scn_.retrieval_decay(t);
  const double L = scn_.ensemble.length_L, c = scn_.ensemble.c;
  double acc = 0.0;
  for (const IrNode& n : ir_nodes_) {
    const cplx j = window_integral(
        t, [&n, c](double u) { return cplx(kernel_H(n.g_diff, u, c), 0.0); });
    acc += n.w * j.real() * j.real();
  }
  return p * p * d * d * (L / c) * acc;
}

double RetrievalSolver::numerator_M(double t, double t_i) const {
  return std::norm(A(t, t_i)) + Phi(t_i) * Ir(t);
}

double RetrievalSolver::flux_core(double t, bool* low_accuracy) const {
  const double p = rctx_.P(t);
  if (p == 0.0 || dw_ < kDegenerateDw) return 0.0;
  if (low_accuracy != nullptr && rctx_.delta_l(t) > scn_.ensemble.length_L)
    *low_accuracy = true;
  double na = 0.0;
  for (const TiNode& nd : ti_nodes_) na += nd.w * std::norm(a_from_node(t, nd));
  return scn_.ensemble.c / scn_.ensemble.length_L * (na / dw_ + Ir(t));
}

double RetrievalSolver::conditional_flux_at(double t) const {
  return scn_.detection.eta_fiber * flux_core(t, nullptr);
}

double RetrievalSolver::spin_population(double t) const {
  if (!(t > 0.0)) return 0.0;
  if (t > wctx_.t_end() * (1.0 + 1e-12))
    throw std::invalid_argument("spin_population: t outside the write window");
  const double L = scn_.ensemble.length_L, c = scn_.ensemble.c;
  const double gre_t = wctx_.Gamma_re(t);
  const double g_t = wctx_.g(t);
  std::vector<std::pair<double, double>> nw;
  gamma_nodes(t, std::max(16, static_cast<int>(std::lround(scn_.grids.n_s * scn_.grids.refine))),
              nw);
  double acc = 0.0;
  for (const auto& [s, w] : nw) {
    const double c2 = wctx_.chi_sq(s);
    if (c2 == 0.0) continue;
    acc += w * c2 * std::exp(-2.0 * (gre_t - wctx_.Gamma_re(s))) *
           W_lookup((g_t - wctx_.g(s)) * L / c);
  }
  return L / c * acc;
}

double RetrievalSolver::conditional_efficiency() const {
  if (dw_ < kDegenerateDw) return 0.0;
  const std::vector<double> edges =
      segment_edges(scn_.read_start(), scn_.read_end(), scn_.read_pulse.breakpoints());
  double acc = 0.0;
  for (size_t k = 0; k + 1 < edges.size(); ++k) {
    acc += gl_panels([this](double t) { return flux_core(t, nullptr); }, edges[k],
                     edges[k + 1], 4);
  }
  return scn_.detection.eta_fiber * acc;
}

Waveform RetrievalSolver::conditional_flux() const {
  Waveform wf;
  wf.write_prob = write_emission_probability();
  if (dw_ < kDegenerateDw) {
    wf.degenerate = true;
    wf.warnings.push_back(
        "write emission probability vanished; the conditional flux is undefined and "
        "reported as zero");
  }

  const double t0 = scn_.read_start(), t1 = scn_.read_end();
  const std::vector<double> edges = segment_edges(t0, t1, scn_.read_pulse.breakpoints());
  const int n_total =
      std::max(32, static_cast<int>(std::lround(scn_.grids.read_points * scn_.grids.refine)));
  const double total = t1 - t0;
  for (size_t k = 0; k + 1 < edges.size(); ++k) {
    const double lo = edges[k], hi = edges[k + 1];
    const int n =
        std::max(16, static_cast<int>(std::lround(n_total * (hi - lo) / total)));
    if (k > 0) {
      // The flux can jump at an interior segment edge (a pulse support boundary,
      // e.g. a hard cutoff). Sample both one-sided limits — the previous segment
      // already emitted the edge itself, so add a point one ulp inside this
      // segment — or the trapezoid smears the jump across the next interval.
      wf.t.push_back(std::nextafter(lo, hi));
    }
    const int j0 = (k == 0) ? 0 : 1; // the edge itself came from the previous segment
    for (int j = j0; j <= n; ++j) wf.t.push_back(lo + (hi - lo) * j / n);
  }

  wf.flux.resize(wf.t.size());
  const double eta = scn_.detection.eta_fiber;
  for (size_t i = 0; i < wf.t.size(); ++i)
    wf.flux[i] = wf.degenerate ? 0.0 : eta * flux_core(wf.t[i], &wf.low_accuracy);

  if (!wf.degenerate) {
    wf.efficiency = conditional_efficiency();
    wf.efficiency_raw = wf.efficiency / eta;
    const double grid_route = trapezoid(wf.t, wf.flux);
    wf.quad_error = std::abs(grid_route - wf.efficiency) /
                    std::max(wf.efficiency, 1e-300);
    if (wf.low_accuracy)
      wf.warnings.push_back(
          "retrieval acceptance window exceeded the medium length; profile accuracy is "
          "reduced");
    if (wf.efficiency_raw > 0.3) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "conditional retrieval efficiency %.3f exceeds 0.3; the linearized "
                    "emission model overestimates strong-drive retrieval",
                    wf.efficiency_raw);
      wf.warnings.push_back(buf);
    }
  }
  return wf;
}

} // namespace dlcz
