#include "dlcz/photon_stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dlcz {
namespace {

constexpr double kTailTol = 1e-12;

void check_prob(double v, const char* name, bool open_top) {
  if (!(v >= 0.0) || (open_top ? !(v < 1.0) : !(v <= 1.0))) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1" +
                                (open_top ? ")" : "]"));
  }
}

int adequate_n_max(double q) {
  if (q <= 0.0) return 8;
  // Geometric tail mass above n is q^(n+1); demand q^(n+1) < kTailTol.
  int n = static_cast<int>(std::ceil(std::log(kTailTol) / std::log(q))) - 1;
  return n < 8 ? 8 : n;
}

// log E[x^n] for n ~ truncated renormalized geometric(q) on 0..n_max,
// parameterized by 1-x (kept exact by the caller) so that moments of
// near-unity x lose no precision:
//   log[(1-q)/(1-qx)] = log1p(-q (1-x) / ((1-q) + q (1-x))).
double log_moment(double q, double one_minus_x, int n_max) {
  if (q == 0.0) return 0.0;
  const double x = 1.0 - one_minus_x;
  double v = std::log1p(-q * one_minus_x / ((1.0 - q) + q * one_minus_x));
  v -= std::log1p(-std::exp((n_max + 1) * std::log(q)));
  if (q * x > 0.0) {
    v += std::log1p(-std::exp((n_max + 1) * std::log(q * x)));
  }
  return v;
}

struct Arms {
  double q = 0.0;
  int K = 1;
  int n_max = 8;
  // Per-photon silence factors and per-gate dark survivals, indexed
  // w = 0, r1 = 1, r2 = 2.
  double silent_photon[3] = {1.0, 1.0, 1.0};
  double log_no_dark[3] = {0.0, 0.0, 0.0};
};

Arms make_arms(const TmsvDetectorModel& m) {
  m.validate();
  Arms a;
  a.q = m.per_mode_q();
  a.K = m.K;
  a.n_max = m.effective_n_max();
  a.silent_photon[0] = 1.0 - m.eta_w;
  a.log_no_dark[0] = std::log1p(-m.dark_w);
  a.log_no_dark[1] = std::log1p(-m.dark_r1);
  a.log_no_dark[2] = std::log1p(-m.dark_r2);
  return a;
}

// log P(every detector in the mask stays silent); bit 0 = w, 1 = r1, 2 = r2.
double log_silent(const Arms& a, const TmsvDetectorModel& m, unsigned mask) {
  // Per-photon click probabilities toward the masked detectors; the read
  // splitter routes exclusively, so read contributions add.
  const double s_write = (mask & 1u) ? 1.0 - a.silent_photon[0] : 0.0;
  double s_read = 0.0;
  if (mask & 2u) s_read += m.split_ratio * m.eta_r1;
  if (mask & 4u) s_read += (1.0 - m.split_ratio) * m.eta_r2;
  // 1 - (1-s_write)(1-s_read), expanded to avoid cancellation.
  const double one_minus_x = s_write + s_read - s_write * s_read;
  double v = a.K * log_moment(a.q, one_minus_x, a.n_max);
  for (int j = 0; j < 3; ++j) {
    if (mask & (1u << j)) v += a.log_no_dark[j];
  }
  return v;
}

// P(at least one detector in the mask clicks), accurate for tiny values.
double p_union(const Arms& a, const TmsvDetectorModel& m, unsigned mask) {
  return -std::expm1(log_silent(a, m, mask));
}

} // namespace

double TmsvDetectorModel::per_mode_q() const {
  if (p == 0.0) return 0.0;
  const double r = p / (1.0 - p);
  return r / (K + r);
}

int TmsvDetectorModel::effective_n_max() const {
  return n_max < 0 ? adequate_n_max(per_mode_q()) : n_max;
}

void TmsvDetectorModel::validate() const {
  check_prob(p, "pair excitation probability p", /*open_top=*/true);
  if (K < 1) throw std::invalid_argument("mode count K must be >= 1");
  check_prob(eta_w, "write detection efficiency", false);
  check_prob(eta_r1, "read detector 1 efficiency", false);
  check_prob(eta_r2, "read detector 2 efficiency", false);
  check_prob(dark_w, "write dark probability", true);
  check_prob(dark_r1, "read detector 1 dark probability", true);
  check_prob(dark_r2, "read detector 2 dark probability", true);
  check_prob(split_ratio, "split ratio", false);
  if (n_max >= 0) {
    const double q = per_mode_q();
    const double tail = q > 0.0 ? std::exp((n_max + 1) * std::log(q)) : 0.0;
    if (!(tail < kTailTol)) {
      throw std::invalid_argument(
          "Fock truncation n_max=" + std::to_string(n_max) +
          " leaves per-mode tail mass " + std::to_string(tail) +
          " >= 1e-12; use n_max >= " + std::to_string(adequate_n_max(q)));
    }
  }
}

double CountProbabilities::sum() const {
  double s = 0.0;
  for (int w = 0; w < 2; ++w)
    for (int r1 = 0; r1 < 2; ++r1)
      for (int r2 = 0; r2 < 2; ++r2) s += p[w][r1][r2];
  return s;
}

CountProbabilities click_probabilities(const TmsvDetectorModel& m) {
  const Arms a = make_arms(m);
  double silent[8];
  for (unsigned mask = 0; mask < 8; ++mask) {
    silent[mask] = std::exp(log_silent(a, m, mask));
  }
  // P(silent set exactly T) = sum over supersets S of T of (-1)^|S\T| P(>=S).
  CountProbabilities out;
  for (unsigned t = 0; t < 8; ++t) {
    double v = 0.0;
    for (unsigned s = 0; s < 8; ++s) {
      if ((s & t) != t) continue;
      const int extra = __builtin_popcount(s & ~t);
      v += (extra % 2 == 0 ? 1.0 : -1.0) * silent[s];
    }
    const unsigned clicks = ~t & 7u;
    out.p[(clicks >> 0) & 1u][(clicks >> 1) & 1u][(clicks >> 2) & 1u] =
        v < 0.0 && v > -1e-15 ? 0.0 : v;
  }
  return out;
}

double g2_conditional(const TmsvDetectorModel& m) {
  const Arms a = make_arms(m);
  const double pw = p_union(a, m, 1u);
  const double p1 = p_union(a, m, 2u);
  const double p2 = p_union(a, m, 4u);
  if (pw <= 0.0) {
    throw std::domain_error(
        "write click probability vanishes; the heralded correlation is "
        "undefined");
  }
  const double pw_r1 = pw + p1 - p_union(a, m, 3u);
  const double pw_r2 = pw + p2 - p_union(a, m, 5u);
  const double triple = pw + p1 + p2 - p_union(a, m, 3u) -
                        p_union(a, m, 5u) - p_union(a, m, 6u) +
                        p_union(a, m, 7u);
  if (pw_r1 <= 0.0 || pw_r2 <= 0.0) {
    throw std::domain_error(
        "a heralded singles probability vanishes; the normalized correlation "
        "is undefined");
  }
  return triple * pw / (pw_r1 * pw_r2);
}

double g2_unconditional(const TmsvDetectorModel& m) {
  const Arms a = make_arms(m);
  const double p1 = p_union(a, m, 2u);
  const double p2 = p_union(a, m, 4u);
  if (p1 <= 0.0 || p2 <= 0.0) {
    throw std::domain_error(
        "a read singles probability vanishes; the normalized correlation is "
        "undefined");
  }
  const double p12 = p1 + p2 - p_union(a, m, 6u);
  return p12 / (p1 * p2);
}

double raw_retrieval_efficiency(double p_wr, double p_wnr, double p_w,
                                bool* noise_dominated) {
  check_prob(p_wr, "coincidence probability p_wr", false);
  check_prob(p_wnr, "noise coincidence probability p_wnr", false);
  check_prob(p_w, "write probability p_w", false);
  if (p_w <= 0.0) {
    throw std::domain_error(
        "write probability is zero; the retrieval efficiency is undefined");
  }
  const double eta = (p_wr - p_wnr) / p_w;
  if (noise_dominated) *noise_dominated = eta < 0.0;
  return eta;
}

double dark_probability(double dark_rate, double gate_width) {
  if (dark_rate < 0.0 || gate_width < 0.0) {
    throw std::invalid_argument(
        "dark rate and gate width must be nonnegative");
  }
  return -std::expm1(-dark_rate * gate_width);
}

} // namespace dlcz
