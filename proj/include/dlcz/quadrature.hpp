#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace dlcz {

using cplx = std::complex<double>;

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  int n_points = 64;
  enum class Spacing { Uniform, Chebyshev } spacing = Spacing::Uniform;

  std::vector<double> samples() const; // strictly increasing, includes both ends
  void validate() const;               // throws std::invalid_argument
};

struct QuadratureSpec {
  enum class Rule { Trapezoid, GaussLegendreComposite } rule = Rule::GaussLegendreComposite;
  double rel_tol = 1e-10;
  int max_levels = 12;
  int initial_panels = 4;
};

struct QuadResult {
  cplx value{};
  double error_estimate = 0.0;
  bool converged = true;
};

// 16-point Gauss-Legendre rule mapped onto [a, b], accumulated left to right
// (fixed summation order keeps results bit-identical across runs).
double gl16(const std::function<double(double)>& f, double a, double b);
cplx gl16c(const std::function<cplx(double)>& f, double a, double b);

// Composite rule over [a, b] with n equal panels of 16 nodes each.
double gl_panels(const std::function<double(double)>& f, double a, double b, int n_panels);
cplx gl_panels_c(const std::function<cplx(double)>& f, double a, double b, int n_panels);

// Appends the abscissas/weights of the composite 16-point rule on [a, b]
// (n_panels equal panels), in increasing abscissa order.
void gl_nodes(double a, double b, int n_panels, std::vector<double>& xs,
              std::vector<double>& ws);

// Panel-doubling integration with a Richardson-style error estimate.
// The result is flagged non-converged (never silently) when max_levels
// is exhausted before |delta| <= rel_tol * |value|.
QuadResult integrate_1d(const std::function<cplx(double)>& f, double a, double b,
                        const QuadratureSpec& spec = {});
QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& spec = {});

// Nested rectangular-domain integrals with per-axis refinement.
QuadResult integrate_nested(const std::function<cplx(double, double)>& f,
                            double ax, double bx, double ay, double by,
                            const QuadratureSpec& spec = {});
QuadResult integrate_nested(const std::function<cplx(double, double, double)>& f,
                            double ax, double bx, double ay, double by,
                            double az, double bz, const QuadratureSpec& spec = {});

// Cumulative integral F(t) = int_{t0}^{t} f, tabulated densely per segment
// (segments split at the supplied breakpoints) with composite Simpson, then
// interpolated with a monotone piecewise cubic (PCHIP) per component so that
// monotone data stays monotone between nodes.
class CumulativeIntegralTable {
public:
  CumulativeIntegralTable() = default;
  CumulativeIntegralTable(const std::function<cplx(double)>& f, double t0, double t1,
                          const std::vector<double>& breakpoints, int n_per_segment);

  cplx eval(double t) const;        // clamped to [t0, t1]
  double eval_real(double t) const; // real part only
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  cplx total() const;

private:
  struct Component {
    std::vector<double> y;
    std::vector<double> d; // PCHIP slopes
  };
  double interp(const Component& c, int i, double t) const;
  int locate(double t) const;

  double t0_ = 0.0, t1_ = 1.0;
  std::vector<double> x_;
  Component re_, im_;
};

// Natural cubic spline on an arbitrary strictly increasing grid.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);
  double eval(double t) const; // clamped to the grid range
private:
  std::vector<double> x_, y_, m_; // m_: second derivatives
};

} // namespace dlcz
