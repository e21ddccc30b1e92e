#include "dlcz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dlcz {

namespace {

// Abscissas/weights for 16-point Gauss-Legendre on [-1, 1].
constexpr double kGlX[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGlW[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

} // namespace

std::vector<double> TimeGrid::samples() const {
  validate();
  std::vector<double> s(static_cast<size_t>(n_points));
  if (spacing == Spacing::Uniform) {
    const double h = (t_end - t_start) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) s[static_cast<size_t>(i)] = t_start + h * i;
  } else {
    // Chebyshev points of the second kind, mapped onto [t_start, t_end].
    for (int i = 0; i < n_points; ++i) {
      const double u = std::cos(M_PI * (n_points - 1 - i) / (n_points - 1));
      s[static_cast<size_t>(i)] = 0.5 * (t_start + t_end) + 0.5 * (t_end - t_start) * u;
    }
  }
  s.front() = t_start;
  s.back() = t_end;
  return s;
}

void TimeGrid::validate() const {
  if (!(t_end > t_start)) throw std::invalid_argument("TimeGrid: t_end must exceed t_start");
  if (n_points < 16) throw std::invalid_argument("TimeGrid: n_points must be at least 16");
}

double gl16(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 7; i >= 0; --i) acc += kGlW[i] * (f(c - h * kGlX[i]) + f(c + h * kGlX[i]));
  return acc * h;
}

cplx gl16c(const std::function<cplx(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx acc{};
  for (int i = 7; i >= 0; --i) acc += kGlW[i] * (f(c - h * kGlX[i]) + f(c + h * kGlX[i]));
  return acc * h;
}

double gl_panels(const std::function<double(double)>& f, double a, double b, int n_panels) {
  double acc = 0.0;
  const double h = (b - a) / n_panels;
  for (int p = 0; p < n_panels; ++p) acc += gl16(f, a + p * h, a + (p + 1) * h);
  return acc;
}

cplx gl_panels_c(const std::function<cplx(double)>& f, double a, double b, int n_panels) {
  cplx acc{};
  const double h = (b - a) / n_panels;
  for (int p = 0; p < n_panels; ++p) acc += gl16c(f, a + p * h, a + (p + 1) * h);
  return acc;
}

void gl_nodes(double a, double b, int n_panels, std::vector<double>& xs,
              std::vector<double>& ws) {
  const double hp = (b - a) / n_panels;
  for (int p = 0; p < n_panels; ++p) {
    const double lo = a + p * hp;
    const double c = lo + 0.5 * hp, h = 0.5 * hp;
    for (int i = 7; i >= 0; --i) {
      xs.push_back(c - h * kGlX[i]);
      ws.push_back(kGlW[i] * h);
    }
    for (int i = 0; i <= 7; ++i) {
      xs.push_back(c + h * kGlX[i]);
      ws.push_back(kGlW[i] * h);
    }
  }
}

namespace {

cplx trapezoid_panels(const std::function<cplx(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  cplx acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) acc += f(a + i * h);
  return acc * h;
}

} // namespace

QuadResult integrate_1d(const std::function<cplx(double)>& f, double a, double b,
                        const QuadratureSpec& spec) {
  QuadResult r;
  if (a == b) return r;
  int n = std::max(1, spec.initial_panels);
  cplx prev = (spec.rule == QuadratureSpec::Rule::Trapezoid) ? trapezoid_panels(f, a, b, n)
                                                             : gl_panels_c(f, a, b, n);
  for (int level = 1; level <= spec.max_levels; ++level) {
    n *= 2;
    const cplx cur = (spec.rule == QuadratureSpec::Rule::Trapezoid)
                         ? trapezoid_panels(f, a, b, n)
                         : gl_panels_c(f, a, b, n);
    const double delta = std::abs(cur - prev);
    r.value = cur;
    r.error_estimate = delta;
    if (delta <= spec.rel_tol * std::max(std::abs(cur), 1e-300)) {
      r.converged = true;
      return r;
    }
    prev = cur;
  }
  r.converged = false;
  return r;
}

QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& spec) {
  return integrate_1d(std::function<cplx(double)>([&f](double t) { return cplx(f(t), 0.0); }), a,
                      b, spec);
}

QuadResult integrate_nested(const std::function<cplx(double, double)>& f, double ax, double bx,
                            double ay, double by, const QuadratureSpec& spec) {
  QuadratureSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  bool inner_ok = true;
  auto outer = [&](double x) {
    const QuadResult q =
        integrate_1d(std::function<cplx(double)>([&](double y) { return f(x, y); }), ay, by, inner);
    if (!q.converged) inner_ok = false;
    return q.value;
  };
  QuadResult r = integrate_1d(std::function<cplx(double)>(outer), ax, bx, spec);
  r.converged = r.converged && inner_ok;
  return r;
}

QuadResult integrate_nested(const std::function<cplx(double, double, double)>& f, double ax,
                            double bx, double ay, double by, double az, double bz,
                            const QuadratureSpec& spec) {
  QuadratureSpec inner = spec;
  inner.rel_tol = spec.rel_tol * 0.1;
  bool inner_ok = true;
  auto outer = [&](double x) {
    const QuadResult q = integrate_nested(
        std::function<cplx(double, double)>([&](double y, double z) { return f(x, y, z); }), ay,
        by, az, bz, inner);
    if (!q.converged) inner_ok = false;
    return q.value;
  };
  QuadResult r = integrate_1d(std::function<cplx(double)>(outer), ax, bx, spec);
  r.converged = r.converged && inner_ok;
  return r;
}

namespace {

// PCHIP (Fritsch-Carlson) slopes: monotone data yields a monotone interpolant.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> h(n - 1), s(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    s[i] = (y[i + 1] - y[i]) / h[i];
  }
  d[0] = s[0];
  d[n - 1] = s[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) {
    if (s[i - 1] * s[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
    }
  }
  return d;
}

} // namespace

CumulativeIntegralTable::CumulativeIntegralTable(const std::function<cplx(double)>& f, double t0,
                                                 double t1,
                                                 const std::vector<double>& breakpoints,
                                                 int n_per_segment) {
  if (!(t1 > t0)) throw std::invalid_argument("CumulativeIntegralTable: empty interval");
  if (n_per_segment < 2) n_per_segment = 2;
  if (n_per_segment % 2) ++n_per_segment; // Simpson needs an even panel count

  t0_ = t0;
  t1_ = t1;
  std::vector<double> edges{t0, t1};
  for (double b : breakpoints)
    if (b > t0 && b < t1) edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [&](double a, double b) { return std::abs(a - b) < 1e-18 * (t1 - t0); }),
              edges.end());

  x_.push_back(t0);
  re_.y.push_back(0.0);
  im_.y.push_back(0.0);
  cplx running{};
  for (size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double a = edges[seg], b = edges[seg + 1];
    const double h = (b - a) / n_per_segment;
    // Breakpoints delimit the pieces of a piecewise-continuous integrand
    // (e.g. a truncated pulse support), so the closed rule must take
    // one-sided limits at segment edges: sampling the edge itself would let
    // a segment on the dead side of a jump pick up the live-side value.
    cplx fa = f(std::nextafter(a, b));
    for (int i = 0; i + 2 <= n_per_segment; i += 2) {
      const double xm = a + (i + 1) * h, xr = a + (i + 2) * h;
      const bool seg_end = i + 2 == n_per_segment;
      const cplx fm = f(xm), fr = f(seg_end ? std::nextafter(b, a) : xr);
      running += (h / 3.0) * (fa + 4.0 * fm + fr);
      x_.push_back(seg_end ? b : xr);
      re_.y.push_back(running.real());
      im_.y.push_back(running.imag());
      fa = fr;
    }
  }
  re_.d = pchip_slopes(x_, re_.y);
  im_.d = pchip_slopes(x_, im_.y);
}

int CumulativeIntegralTable::locate(double t) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  int i = static_cast<int>(it - x_.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(x_.size()) - 2);
  return i;
}

double CumulativeIntegralTable::interp(const Component& c, int i, double t) const {
  const double h = x_[static_cast<size_t>(i) + 1] - x_[static_cast<size_t>(i)];
  const double u = (t - x_[static_cast<size_t>(i)]) / h;
  const double y0 = c.y[static_cast<size_t>(i)], y1 = c.y[static_cast<size_t>(i) + 1];
  const double d0 = c.d[static_cast<size_t>(i)] * h, d1 = c.d[static_cast<size_t>(i) + 1] * h;
  const double u2 = u * u, u3 = u2 * u;
  return y0 * (2 * u3 - 3 * u2 + 1) + d0 * (u3 - 2 * u2 + u) + y1 * (-2 * u3 + 3 * u2) +
         d1 * (u3 - u2);
}

cplx CumulativeIntegralTable::eval(double t) const {
  if (x_.empty()) return {};
  t = std::clamp(t, t0_, t1_);
  const int i = locate(t);
  return {interp(re_, i, t), interp(im_, i, t)};
}

double CumulativeIntegralTable::eval_real(double t) const {
  if (x_.empty()) return 0.0;
  t = std::clamp(t, t0_, t1_);
  return interp(re_, locate(t), t);
}

cplx CumulativeIntegralTable::total() const {
  if (x_.empty()) return {};
  return {re_.y.back(), im_.y.back()};
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const size_t n = x_.size();
  if (n != y_.size() || n < 2) throw std::invalid_argument("CubicSpline: bad inputs");
  m_.assign(n, 0.0);
  if (n == 2) return;
  // Thomas solve of the natural-spline tridiagonal system.
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
  b[0] = 1.0;
  b[n - 1] = 1.0;
  for (size_t i = 1; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
    a[i] = hl / 6.0;
    b[i] = (hl + hr) / 3.0;
    c[i] = hr / 6.0;
    r[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
  }
  for (size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    r[i] -= w * r[i - 1];
  }
  m_[n - 1] = r[n - 1] / b[n - 1];
  for (size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
}

double CubicSpline::eval(double t) const {
  if (x_.empty()) return 0.0;
  t = std::clamp(t, x_.front(), x_.back());
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  size_t i = static_cast<size_t>(std::clamp<long>(it - x_.begin() - 1, 0,
                                                  static_cast<long>(x_.size()) - 2));
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * (h * h) / 6.0;
}

} // namespace dlcz
