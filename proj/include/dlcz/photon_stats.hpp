#pragma once

// Photon-counting statistics of the write/read photon pair.
//
// The joint state is modeled as K independent two-mode squeezed pairs; the
// per-mode excitation probability q is fixed by matching the total mean pair
// number to the single-mode parameterization p: K q/(1-q) = p/(1-p). Each
// mode's pair-number distribution is the geometric (1-q) q^n, truncated at
// n_max and renormalized. Detectors are non-number-resolving buckets with
// independent efficiency and dark probability per gate; the read arm is
// split toward two detectors for autocorrelation measurements.
//
// All click probabilities reduce to moments E[x^n] of the truncated
// geometric, which have a closed form evaluated in log space so that
// correlation functions stay accurate when click probabilities are ~1e-8.

namespace dlcz {

struct TmsvDetectorModel {
  double p = 0.0;   // total pair-excitation probability, in [0, 1)
  int K = 1;        // number of independent mode pairs, >= 1
  int n_max = -1;   // per-mode Fock truncation; -1 selects the smallest
                    // truncation with tail mass < 1e-12 (floor 8)

  double eta_w = 1.0;       // write-arm detection efficiency
  double dark_w = 0.0;      // write-arm dark probability per gate
  double eta_r1 = 1.0;      // read-arm detector 1 efficiency
  double dark_r1 = 0.0;
  double eta_r2 = 1.0;      // read-arm detector 2 efficiency
  double dark_r2 = 0.0;
  double split_ratio = 0.5; // fraction of read photons routed to detector 1

  double per_mode_q() const;  // solves K q/(1-q) = p/(1-p)
  int effective_n_max() const;
  // Throws std::invalid_argument on out-of-range fields and a
  // truncation-inadequacy error (with the smallest adequate n_max) when an
  // explicit n_max leaves tail mass >= 1e-12.
  void validate() const;
};

// Joint click-pattern probabilities over (write, read1, read2); index 1 means
// the detector clicked during the gate. Nonnegative, sums to 1.
struct CountProbabilities {
  double p[2][2][2] = {};
  double sum() const;
};

CountProbabilities click_probabilities(const TmsvDetectorModel& m);

// Heralded read-arm cross correlation p(r1,r2|w) / [p(r1|w) p(r2|w)].
// Throws std::domain_error when the write or either heralded singles
// probability vanishes.
double g2_conditional(const TmsvDetectorModel& m);

// Unheralded read-arm autocorrelation p(r1,r2) / [p(r1) p(r2)].
double g2_unconditional(const TmsvDetectorModel& m);

// (p_wr - p_wnr) / p_w. Requires p_w > 0 and probabilities in [0, 1]; a
// negative result (noise exceeding signal) is returned as-is and
// *noise_dominated is set when provided.
double raw_retrieval_efficiency(double p_wr, double p_wnr, double p_w,
                                bool* noise_dominated = nullptr);

// Dark probability accumulated over a gate: 1 - exp(-rate * width).
double dark_probability(double dark_rate, double gate_width);

} // namespace dlcz
