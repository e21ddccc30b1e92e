#include "dlcz/correlators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "dlcz/bessel.hpp"
#include "dlcz/quadrature.hpp"

namespace dlcz {

IntVar IntVar::range(std::string name, double lo, double hi) {
  IntVar v;
  v.name = std::move(name);
  v.const_bounds = true;
  v.lo_c = lo;
  v.hi_c = hi;
  return v;
}

IntVar IntVar::range_fn(std::string name, std::function<double(const Vals&)> lo,
                        std::function<double(const Vals&)> hi) {
  IntVar v;
  v.name = std::move(name);
  v.const_bounds = false;
  v.lo_f = std::move(lo);
  v.hi_f = std::move(hi);
  return v;
}

FieldExpansion FieldExpansion::dagger() const {
  FieldExpansion out;
  out.terms.reserve(terms.size());
  for (const auto& t : terms) {
    ExpansionTerm d = t;
    d.input.dagger = !t.input.dagger;
    auto f = t.amplitude;
    d.amplitude = [f](const Vals& v) { return std::conj(f(v)); };
    out.terms.push_back(std::move(d));
  }
  return out;
}

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kSqrt2Pi = 2.5066282746310005024;

bool contractable(const ExpansionTerm& left, const ExpansionTerm& right) {
  return !left.input.dagger && right.input.dagger && left.input.kind == right.input.kind;
}

bool is_noise(InputKind k) { return k == InputKind::WriteNoise || k == InputKind::ReadNoise; }

struct Subst {
  enum class Mode { Active, Copy, Const } mode = Mode::Active;
  int src = -1;
  double value = 0.0;
};

// The symbolic collapse of one contraction's delta functions: which combined
// variables survive, which are substituted, and which bounds still need a
// leaf-level membership check.
struct ContractionPlan {
  bool zero = false;
  bool delta0_used = false;
  double delta0_factor = 1.0;
  bool weight_time_fixed = true;
  double weight_time = 0.0;
  int weight_time_src = -1;
  std::vector<Subst> subst;
  std::vector<double> alo, ahi; // tightened const bounds for the left term's vars
  std::vector<int> indicators;  // combined indices whose bounds are checked at the leaf
};

ContractionPlan build_plan(const ExpansionTerm& a, const ExpansionTerm& b,
                           const MomentOptions& opts) {
  ContractionPlan p;
  const int na = static_cast<int>(a.vars.size());
  p.subst.assign(a.vars.size() + b.vars.size(), Subst{});
  p.alo.resize(a.vars.size());
  p.ahi.resize(a.vars.size());
  for (int i = 0; i < na; ++i) {
    p.alo[i] = a.vars[i].lo_c;
    p.ahi[i] = a.vars[i].hi_c;
  }

  auto handle = [&](const Binding& A, const Binding& B, bool is_time) {
    if (!A.is_var && !B.is_var) {
      const double tol = 1e-12 * std::max({1.0, std::abs(A.value), std::abs(B.value)});
      if (std::abs(A.value - B.value) <= tol) {
        if (!opts.allow_delta0)
          throw std::domain_error(
              "contraction of two fixed-argument inputs produces delta(0); set "
              "allow_delta0 and a delta0_norm to regularize");
        p.delta0_factor *= opts.delta0_norm;
        p.delta0_used = true;
        if (is_time) {
          p.weight_time_fixed = true;
          p.weight_time = A.value;
        }
      } else {
        p.zero = true;
      }
      return;
    }
    if (A.is_var && B.is_var) {
      const int ca = A.var;
      const int cb = na + B.var;
      if (p.subst[cb].mode != Subst::Mode::Active)
        throw std::logic_error("contraction binds one variable twice");
      p.subst[cb] = {Subst::Mode::Copy, ca, 0.0};
      const IntVar& av = a.vars[A.var];
      const IntVar& bv = b.vars[B.var];
      if (av.const_bounds && bv.const_bounds && p.subst[ca].mode == Subst::Mode::Active) {
        p.alo[ca] = std::max(p.alo[ca], bv.lo_c);
        p.ahi[ca] = std::min(p.ahi[ca], bv.hi_c);
        if (!(p.ahi[ca] > p.alo[ca])) p.zero = true;
      } else {
        p.indicators.push_back(cb);
      }
      if (is_time) {
        p.weight_time_fixed = false;
        p.weight_time_src = ca;
      }
      return;
    }
    // one bound variable, one fixed value
    const bool var_on_left = A.is_var;
    const int cv = var_on_left ? A.var : na + B.var;
    const double cval = var_on_left ? B.value : A.value;
    const IntVar& v = var_on_left ? a.vars[A.var] : b.vars[B.var];
    if (p.subst[cv].mode != Subst::Mode::Active)
      throw std::logic_error("contraction binds one variable twice");
    p.subst[cv] = {Subst::Mode::Const, -1, cval};
    if (v.const_bounds) {
      if (cval < v.lo_c || cval > v.hi_c) p.zero = true;
    } else {
      p.indicators.push_back(cv);
    }
    if (is_time) {
      p.weight_time_fixed = true;
      p.weight_time = cval;
    }
  };

  switch (a.input.kind) {
    case InputKind::VacuumWriteField:
      handle(a.t_bind, b.t_bind, true);
      break;
    case InputKind::InitialSpin:
      handle(a.z_bind, b.z_bind, false);
      break;
    case InputKind::WriteNoise:
    case InputKind::ReadNoise:
      handle(a.z_bind, b.z_bind, false);
      handle(a.t_bind, b.t_bind, true);
      break;
  }
  return p;
}

class ContractionEval {
public:
  ContractionEval(const ExpansionTerm& a, const ExpansionTerm& b, const MomentRules& rules,
                  const ContractionPlan& plan, int panels)
      : a_(a), b_(b), rules_(rules), plan_(plan), panels_(panels), av_(a.vars.size()),
        bv_(b.vars.size()) {}

  cplx run() { return eval(0); }

private:
  int na() const { return static_cast<int>(a_.vars.size()); }
  int total() const { return na() + static_cast<int>(b_.vars.size()); }
  double value_at(int ci) const { return ci < na() ? av_[ci] : bv_[ci - na()]; }
  void assign(int ci, double x) {
    if (ci < na())
      av_[ci] = x;
    else
      bv_[ci - na()] = x;
  }
  const IntVar& var(int ci) const { return ci < na() ? a_.vars[ci] : b_.vars[ci - na()]; }
  const Vals& own_vals(int ci) const { return ci < na() ? av_ : bv_; }

  cplx eval(int ci) {
    if (ci == total()) return leaf();
    const Subst& s = plan_.subst[ci];
    if (s.mode == Subst::Mode::Copy) {
      assign(ci, value_at(s.src));
      return eval(ci + 1);
    }
    if (s.mode == Subst::Mode::Const) {
      assign(ci, s.value);
      return eval(ci + 1);
    }
    const IntVar& v = var(ci);
    double lo, hi;
    if (ci < na() && v.const_bounds) {
      lo = plan_.alo[ci];
      hi = plan_.ahi[ci];
    } else if (v.const_bounds) {
      lo = v.lo_c;
      hi = v.hi_c;
    } else {
      lo = v.lo_f(own_vals(ci));
      hi = v.hi_f(own_vals(ci));
    }
    if (!(hi > lo)) return {};
    return gl_panels_c([this, ci](double x) {
      assign(ci, x);
      return eval(ci + 1);
    }, lo, hi, panels_);
  }

  cplx leaf() {
    for (int ci : plan_.indicators) {
      const IntVar& v = var(ci);
      const double lo = v.const_bounds ? v.lo_c : v.lo_f(own_vals(ci));
      const double hi = v.const_bounds ? v.hi_c : v.hi_f(own_vals(ci));
      const double x = value_at(ci);
      if (x < lo || x > hi) return {};
    }
    double w = 0.0;
    switch (a_.input.kind) {
      case InputKind::VacuumWriteField:
        w = rules_.L / rules_.c;
        break;
      case InputKind::InitialSpin:
        w = rules_.L;
        break;
      case InputKind::WriteNoise: {
        const double ts =
            plan_.weight_time_fixed ? plan_.weight_time : value_at(plan_.weight_time_src);
        w = 2.0 * rules_.L * rules_.gamma_S(ts);
        break;
      }
      case InputKind::ReadNoise:
        w = 2.0 * rules_.L * rules_.gamma_eg;
        break;
    }
    return a_.amplitude(av_) * b_.amplitude(bv_) * (w * plan_.delta0_factor);
  }

  const ExpansionTerm& a_;
  const ExpansionTerm& b_;
  const MomentRules& rules_;
  const ContractionPlan& plan_;
  int panels_;
  Vals av_, bv_;
};

struct ContractionValue {
  cplx v{};
  double err = 0.0;
};

ContractionValue contract(const ExpansionTerm& a, const ExpansionTerm& b,
                          const MomentRules& rules, const MomentOptions& opts) {
  const ContractionPlan plan = build_plan(a, b, opts);
  if (plan.zero) return {};
  ContractionValue out;
  out.v = ContractionEval(a, b, rules, plan, opts.panels).run();
  if (opts.estimate_error) {
    const cplx coarse =
        ContractionEval(a, b, rules, plan, std::max(1, opts.panels / 2)).run();
    out.err = std::abs(out.v - coarse);
  }
  return out;
}

struct Accum {
  cplx value{};
  double err = 0.0;
  bool noise = false;
};

MomentResult finish(std::map<std::string, Accum>& acc, const MomentOptions& opts) {
  MomentResult r;
  for (const auto& [label, a] : acc) { // std::map iterates in label order
    r.term_breakdown.push_back({label, a.value, a.noise, a.err});
    r.value += a.value;
    r.error_estimate += a.err;
    if (a.value != cplx{}) {
      ++r.n_pairings;
      if (a.noise) ++r.n_noise_pairs;
    }
  }
  const double scale = std::abs(r.value);
  for (const auto& t : r.term_breakdown) {
    if (t.error_estimate > opts.converge_tol * std::max(std::abs(t.value), 1e-6 * scale))
      r.nonconverged_labels.push_back(t.label);
  }
  return r;
}

} // namespace

MomentResult second_moment(const FieldExpansion& X, const FieldExpansion& Y,
                           const MomentRules& rules, const MomentOptions& opts) {
  std::map<std::string, Accum> acc;
  for (const auto& x : X.terms) {
    for (const auto& y : Y.terms) {
      if (!contractable(x, y)) continue;
      const ContractionValue cv = contract(x, y, rules, opts);
      Accum& a = acc[x.name + "~" + y.name];
      a.value += cv.v;
      a.err += cv.err;
      a.noise = is_noise(x.input.kind);
    }
  }
  return finish(acc, opts);
}

MomentResult wick_fourth_moment(const FieldExpansion& x1, const FieldExpansion& x2,
                                const FieldExpansion& x3, const FieldExpansion& x4,
                                const MomentRules& rules, const MomentOptions& opts) {
  const FieldExpansion* F[4] = {&x1, &x2, &x3, &x4};

  // Ordered contraction cache: (left slot, right slot, left term, right term).
  std::map<std::array<int, 4>, ContractionValue> cache;
  auto pair_value = [&](int si, int sj, int ti, int tj) -> const ContractionValue& {
    const std::array<int, 4> key{si, sj, ti, tj};
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, contract(F[si]->terms[ti], F[sj]->terms[tj], rules, opts)).first;
    return it->second;
  };

  // Conjugation (the adjoint symmetry of an A`B`BA-ordered moment) maps slot
  // s to 3-s, so min(s, 3-s) labels a term by its operator family and the
  // orbit key below is conjugation-invariant.
  auto contraction_key = [&](int si, int sj, int ti, int tj) {
    const auto part = [&](int s, int t) {
      return std::to_string(std::min(s, 3 - s)) + ":" + F[s]->terms[t].name;
    };
    std::string a = part(si, ti), b = part(sj, tj);
    if (b < a) std::swap(a, b);
    return a + "~" + b;
  };

  static constexpr int kRoutes[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  std::map<std::string, Accum> acc;

  for (int r = 0; r < 3; ++r) {
    const int p1 = kRoutes[r][0], p2 = kRoutes[r][1], p3 = kRoutes[r][2], p4 = kRoutes[r][3];
    for (int i1 = 0; i1 < static_cast<int>(F[p1]->terms.size()); ++i1) {
      for (int i2 = 0; i2 < static_cast<int>(F[p2]->terms.size()); ++i2) {
        if (!contractable(F[p1]->terms[i1], F[p2]->terms[i2])) continue;
        const ContractionValue& c1 = pair_value(p1, p2, i1, i2);
        for (int i3 = 0; i3 < static_cast<int>(F[p3]->terms.size()); ++i3) {
          for (int i4 = 0; i4 < static_cast<int>(F[p4]->terms.size()); ++i4) {
            if (!contractable(F[p3]->terms[i3], F[p4]->terms[i4])) continue;
            const ContractionValue& c2 = pair_value(p3, p4, i3, i4);
            std::string ka = contraction_key(p1, p2, i1, i2);
            std::string kb = contraction_key(p3, p4, i3, i4);
            if (kb < ka) std::swap(ka, kb);
            Accum& a = acc["r" + std::to_string(r + 1) + " " + ka + " & " + kb];
            a.value += c1.v * c2.v;
            a.err += std::abs(c1.v) * c2.err + std::abs(c2.v) * c1.err;
            a.noise = is_noise(F[p1]->terms[i1].input.kind) &&
                      is_noise(F[p3]->terms[i3].input.kind);
          }
        }
      }
    }
  }
  return finish(acc, opts);
}

// --- Field expansion builders -----------------------------------------------

namespace {

// The five spin-wave creation-operator term groups at (z', t). When
// z_from_var0 is set, z' is integration variable 0 (range [0, L]) of every
// term and `outer` multiplies each amplitude (used to compose the retrieval
// kernel); otherwise z' = z_fixed.
void build_spinwave_terms(const WriteKernelContext& ctx, double t, bool z_from_var0,
                          double z_fixed, const std::function<cplx(const Vals&)>& outer,
                          std::vector<ExpansionTerm>& out) {
  const double L = ctx.ensemble().length_L;
  const double c = ctx.ensemble().c;
  const cplx Gt = ctx.Gamma(t);
  const double gt = ctx.g(t);
  const int off = z_from_var0 ? 1 : 0;
  const WriteKernelContext* cx = &ctx;

  const auto zref = [z_from_var0, z_fixed](const Vals& v) {
    return z_from_var0 ? v[0] : z_fixed;
  };
  const auto wrap = [&outer](std::function<cplx(const Vals&)> f) {
    if (!outer) return f;
    auto o = outer;
    return std::function<cplx(const Vals&)>(
        [o, g = std::move(f)](const Vals& v) { return o(v) * g(v); });
  };
  const auto add_u = [&](ExpansionTerm& T) {
    if (z_from_var0) T.vars.push_back(IntVar::range("u", 0.0, L));
  };
  const Binding zbind_eval = z_from_var0 ? Binding::of_var(0) : Binding::fixed(z_fixed);
  const auto z2var = [&]() {
    if (z_from_var0)
      return IntVar::range_fn("z2", [](const Vals&) { return 0.0; },
                              [](const Vals& v) { return v[0]; });
    return IntVar::range("z2", 0.0, z_fixed);
  };

  {
    ExpansionTerm T;
    T.input = {InputKind::InitialSpin, true};
    add_u(T);
    T.z_bind = zbind_eval;
    const cplx amp = std::exp(-Gt);
    T.amplitude = wrap([amp](const Vals&) { return amp; });
    T.name = "spin_decay";
    out.push_back(std::move(T));
  }
  {
    ExpansionTerm T;
    T.input = {InputKind::WriteNoise, true};
    add_u(T);
    T.vars.push_back(IntVar::range("t2", 0.0, t));
    T.z_bind = zbind_eval;
    T.t_bind = Binding::of_var(off);
    T.amplitude = wrap([cx, Gt, off](const Vals& v) { return std::exp(-(Gt - cx->Gamma(v[off]))); });
    T.name = "noise_local";
    out.push_back(std::move(T));
  }
  {
    ExpansionTerm T;
    T.input = {InputKind::VacuumWriteField, false};
    add_u(T);
    T.vars.push_back(IntVar::range("t2", 0.0, t));
    T.t_bind = Binding::of_var(off);
    T.amplitude = wrap([cx, Gt, gt, off, zref, c](const Vals& v) {
      const double s = v[off];
      return -kI * cx->chi(s) * std::exp(-(Gt - cx->Gamma(s))) *
             kernel_H(gt - cx->g(s), zref(v), c);
    });
    T.name = "vac_drive";
    out.push_back(std::move(T));
  }
  {
    ExpansionTerm T;
    T.input = {InputKind::InitialSpin, true};
    add_u(T);
    T.vars.push_back(z2var());
    T.z_bind = Binding::of_var(off);
    T.amplitude = wrap([cx, Gt, gt, off, zref, c](const Vals& v) {
      return std::exp(-Gt) * kernel_Gs(gt, zref(v) - v[off], c);
    });
    T.name = "spin_dress";
    out.push_back(std::move(T));
  }
  {
    ExpansionTerm T;
    T.input = {InputKind::WriteNoise, true};
    add_u(T);
    T.vars.push_back(IntVar::range("t2", 0.0, t));
    T.vars.push_back(z2var());
    T.z_bind = Binding::of_var(off + 1);
    T.t_bind = Binding::of_var(off);
    T.amplitude = wrap([cx, Gt, gt, off, zref, c](const Vals& v) {
      const double s = v[off];
      return std::exp(-(Gt - cx->Gamma(s))) * kernel_Gs(gt - cx->g(s), zref(v) - v[off + 1], c);
    });
    T.name = "noise_dress";
    out.push_back(std::move(T));
  }
}

} // namespace

FieldExpansion expand_spinwave(const WriteKernelContext& ctx, double z, double t) {
  const double L = ctx.ensemble().length_L;
  if (!(z >= 0.0 && z <= L))
    throw std::invalid_argument("expand_spinwave: z outside the medium");
  if (!(t >= 0.0 && t <= ctx.t_end() * (1.0 + 1e-12)))
    throw std::invalid_argument("expand_spinwave: t outside the write window");
  FieldExpansion out;
  build_spinwave_terms(ctx, t, false, z, nullptr, out.terms);
  return out;
}

FieldExpansion expand_write_field(const WriteKernelContext& ctx, double t) {
  if (!(t >= 0.0 && t <= ctx.t_end() * (1.0 + 1e-12)))
    throw std::invalid_argument("expand_write_field: t outside the write window");
  const double L = ctx.ensemble().length_L;
  const double c = ctx.ensemble().c;
  const cplx Gt = ctx.Gamma(t);
  const double gt = ctx.g(t);
  const double chit = ctx.chi(t);
  const WriteKernelContext* cx = &ctx;
  FieldExpansion out;

  {
    ExpansionTerm T;
    T.input = {InputKind::VacuumWriteField, false};
    T.t_bind = Binding::fixed(t);
    T.amplitude = [](const Vals&) { return cplx{1.0, 0.0}; };
    T.name = "vac_in";
    out.terms.push_back(std::move(T));
  }
  {
    ExpansionTerm T;
    T.input = {InputKind::InitialSpin, true};
    T.vars.push_back(IntVar::range("z2", 0.0, L));
    T.z_bind = Binding::of_var(0);
    T.amplitude = [chit, Gt, gt, L, c](const Vals& v) {
      return kI * (chit / c) * std::exp(-Gt) * kernel_H(gt, L - v[0], c);
    };
    T.name = "spin_gain";
    out.terms.push_back(std::move(T));
  }
  {
    ExpansionTerm T;
    T.input = {InputKind::WriteNoise, true};
    T.vars.push_back(IntVar::range("t2", 0.0, t));
    T.vars.push_back(IntVar::range("z2", 0.0, L));
    T.t_bind = Binding::of_var(0);
    T.z_bind = Binding::of_var(1);
    T.amplitude = [cx, chit, Gt, gt, L, c](const Vals& v) {
      return kI * (chit / c) * std::exp(-(Gt - cx->Gamma(v[0]))) *
             kernel_H(gt - cx->g(v[0]), L - v[1], c);
    };
    T.name = "noise_gain";
    out.terms.push_back(std::move(T));
  }
  {
    ExpansionTerm T;
    T.input = {InputKind::VacuumWriteField, false};
    T.vars.push_back(IntVar::range("t2", 0.0, t));
    T.t_bind = Binding::of_var(0);
    T.amplitude = [cx, chit, Gt, gt, L, c](const Vals& v) {
      return (chit / c) * cx->chi(v[0]) * std::exp(-(Gt - cx->Gamma(v[0]))) *
             kernel_Ge(gt - cx->g(v[0]), L, c);
    };
    T.name = "vac_gain";
    out.terms.push_back(std::move(T));
  }
  return out;
}

FieldExpansion expand_read_field(const Scenario& scn, const WriteKernelContext& wctx,
                                 const ReadKernelContext& rctx, double t,
                                 bool include_noise_terms) {
  FieldExpansion out;
  const double P = rctx.P(t);
  if (P == 0.0) return out;
  const double uc = rctx.u_c(t);
  const double dl = rctx.delta_l(t);
  if (!(uc > 0.0) || !(dl > 0.0)) return out;

  const double D = scn.retrieval_decay(t);
  const double norm = 1.0 / (kSqrt2Pi * dl);
  const auto pre = [P, D, uc, dl, norm](const Vals& v) {
    const double x = (v[0] - uc) / dl;
    return cplx(-P * D * norm * std::exp(-0.5 * x * x), 0.0);
  };

  FieldExpansion sdag;
  build_spinwave_terms(wctx, rctx.xi(), true, 0.0, pre, sdag.terms);
  out = sdag.dagger();

  if (include_noise_terms) {
    const double L = scn.ensemble.length_L;
    const double xi = rctx.xi();
    const double d_r_bar = scn.ensemble.d_r_bar;
    const double gamma_eg = scn.ensemble.gamma_eg;
    const ReadKernelContext* rc = &rctx;
    const Scenario* sc = &scn;

    const auto uvar = IntVar::range_fn(
        "u", [rc](const Vals& v) { return -rc->u_c(v[0]); },
        [rc, L](const Vals& v) { return L - rc->u_c(v[0]); });

    // Common retrieval-kernel factor with the sweep taken from t' to t.
    const auto bulk = [rc, sc, P, t, L, d_r_bar](const Vals& v) -> cplx {
      const double tp = v[0], u = v[1];
      const double dtc = rc->u_c(t) - rc->u_c(tp);
      if (!(dtc > 0.0)) return {};
      const double dlp = std::sqrt(2.0 * L * dtc / d_r_bar);
      const double lz = u - dtc; // L - z in the original coordinates
      const double dprev = sc->retrieval_decay(tp);
      const double decay = dprev > 0.0 ? sc->retrieval_decay(t) / dprev : 0.0;
      const double x = lz / dlp;
      return cplx(-P * decay * std::exp(-0.5 * x * x) / (kSqrt2Pi * dlp), 0.0);
    };

    {
      ExpansionTerm T;
      T.input = {InputKind::WriteNoise, false};
      T.vars.push_back(IntVar::range("tp", xi, t));
      T.vars.push_back(uvar);
      T.t_bind = Binding::of_var(0);
      T.z_bind = Binding::of_var(1);
      T.amplitude = bulk;
      T.name = "read_noise_s";
      out.terms.push_back(std::move(T));
    }
    {
      ExpansionTerm T;
      T.input = {InputKind::ReadNoise, false};
      T.vars.push_back(IntVar::range("tp", xi, t));
      T.vars.push_back(uvar);
      T.t_bind = Binding::of_var(0);
      T.z_bind = Binding::of_var(1);
      T.amplitude = [rc, bulk, t, L, d_r_bar, gamma_eg](const Vals& v) -> cplx {
        const double tp = v[0], u = v[1];
        const double dtc = rc->u_c(t) - rc->u_c(tp);
        if (!(dtc > 0.0)) return {};
        const double dlp2 = 2.0 * L * dtc / d_r_bar;
        const double lz = u - dtc;
        const double factor =
            (dlp2 + lz * (2.0 * dtc + lz)) / (4.0 * gamma_eg * dtc * dtc) *
            rc->pulse().omega_bar(tp);
        return bulk(v) * (kI * factor);
      };
      T.name = "read_noise_p";
      out.terms.push_back(std::move(T));
    }
    {
      ExpansionTerm T;
      T.input = {InputKind::ReadNoise, false};
      T.z_bind = Binding::fixed(0.0);
      T.t_bind = Binding::fixed(t);
      const cplx amp = kI * D / std::sqrt(rctx.g2N());
      T.amplitude = [amp](const Vals&) { return amp; };
      T.name = "read_noise_edge";
      out.terms.push_back(std::move(T));
    }
  }
  return out;
}

MomentRules moment_rules_for(const Scenario& scn, const WriteKernelContext& wctx) {
  MomentRules r;
  r.L = scn.ensemble.length_L;
  r.c = scn.ensemble.c;
  r.gamma_eg = scn.ensemble.gamma_eg;
  const WriteKernelContext* cx = &wctx;
  r.gamma_S = [cx](double t) { return cx->gamma_S(t); };
  return r;
}

} // namespace dlcz
