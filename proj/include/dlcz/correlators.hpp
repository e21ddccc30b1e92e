#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dlcz/kernels.hpp"

namespace dlcz {

// ---------------------------------------------------------------------------
// Symbolic field expansions over the elementary vacuum/noise inputs, and the
// Gaussian-moment (Wick) pairing engine that evaluates their second and
// fourth moments. The only nonzero elementary two-point moments are the
// anti-normally-ordered ones:
//   <E(0,t) E`(0,t')>  = (L/c) delta(t-t')      [vacuum field at the entrance]
//   <S(z,0) S`(z',0)>  =  L    delta(z-z')      [initial spin vacuum]
//   <Fs Fs`>           = 2 gamma_S(t) L delta(z-z') delta(t-t')
//   <Fp Fp`>           = 2 gamma_eg   L delta(z-z') delta(t-t')
// (` denotes the adjoint); every normally-ordered moment vanishes.
// ---------------------------------------------------------------------------

enum class InputKind { VacuumWriteField, InitialSpin, WriteNoise, ReadNoise };

struct ElementaryInput {
  InputKind kind = InputKind::VacuumWriteField;
  bool dagger = false;
};

using Vals = std::vector<double>;

// One integration variable of a term. Bounds are either constants or
// functions of the SAME term's earlier variables (outermost first); the
// callback receives the term's value vector with entries before this
// variable's index already assigned.
struct IntVar {
  std::string name;
  bool const_bounds = true;
  double lo_c = 0.0, hi_c = 0.0;
  std::function<double(const Vals&)> lo_f, hi_f;

  static IntVar range(std::string name, double lo, double hi);
  static IntVar range_fn(std::string name, std::function<double(const Vals&)> lo,
                         std::function<double(const Vals&)> hi);
};

// How an elementary input's z or t argument is supplied: a fixed number or
// one of the term's integration variables.
struct Binding {
  bool is_var = false;
  int var = -1;
  double value = 0.0;

  static Binding fixed(double v) { return {false, -1, v}; }
  static Binding of_var(int idx) { return {true, idx, 0.0}; }
};

struct ExpansionTerm {
  ElementaryInput input;
  std::vector<IntVar> vars; // nesting order, outermost first
  Binding z_bind = Binding::fixed(0.0);
  Binding t_bind = Binding::fixed(0.0);
  std::function<cplx(const Vals&)> amplitude; // kernel coefficient at the var values
  std::string name;                           // stable label; dagger() preserves it
};

// A field operator written as a finite sum of kernel x input terms. The
// expansions returned by the builders below borrow the kernel contexts they
// were built from; keep those alive while the expansion is in use.
struct FieldExpansion {
  std::vector<ExpansionTerm> terms;
  FieldExpansion dagger() const; // conjugate amplitudes, flip daggers, keep names
};

struct MomentRules {
  double L = 0.0;
  double c = 0.0;
  double gamma_eg = 0.0;
  std::function<double(double)> gamma_S; // write-noise rate at time t
};

struct MomentOptions {
  int panels = 4;            // GL16 panels per surviving integration dimension
  double delta0_norm = 0.0;  // finite stand-in for delta(0) on fixed-fixed pairings
  bool allow_delta0 = false; // without this, a fixed-fixed equal pairing throws
  bool estimate_error = true;
  double converge_tol = 0.05; // relative half-resolution drift that flags a pairing
};

struct PairingContribution {
  std::string label;
  cplx value{};
  bool noise_pair = false; // every contraction in this pairing is against a Langevin input
  double error_estimate = 0.0;
};

struct MomentResult {
  cplx value{};
  std::vector<PairingContribution> term_breakdown; // sorted by label; includes zero-valued entries
  double error_estimate = 0.0;
  int n_pairings = 0;    // entries with nonzero value
  int n_noise_pairs = 0; // nonzero entries whose contractions are all noise
  std::vector<std::string> nonconverged_labels;
};

// <X Y> by ordered pairing of X's annihilators against Y's creators. Delta
// functions are collapsed symbolically (never sampled on a grid); a delta
// landing exactly on an integration boundary is counted with full weight.
MomentResult second_moment(const FieldExpansion& X, const FieldExpansion& Y,
                           const MomentRules& rules, const MomentOptions& opts = {});

// <X1 X2 X3 X4> for zero-mean Gaussian inputs: sum over the three pair
// decompositions of products of ordered two-point moments. Contributions are
// grouped into conjugation orbits under the (X1,X4)/(X2,X3) adjoint symmetry
// of an A`B`BA-ordered moment, which matches how the surviving terms are
// conventionally counted; term_breakdown holds one entry per orbit.
MomentResult wick_fourth_moment(const FieldExpansion& x1, const FieldExpansion& x2,
                                const FieldExpansion& x3, const FieldExpansion& x4,
                                const MomentRules& rules, const MomentOptions& opts = {});

// --- Field expansion builders (the solved propagation equations) ---

// Spin-wave creation operator at (z, t) inside the write window: five term
// groups — decayed initial spin, local noise, vacuum-field drive, and the
// gain-dressed initial-spin / noise convolutions.
FieldExpansion expand_spinwave(const WriteKernelContext& ctx, double z, double t);

// Write field at the cell exit (z = L): passthrough vacuum, gain-dressed
// initial spin, gain-dressed noise, and gain-dressed vacuum terms.
FieldExpansion expand_write_field(const WriteKernelContext& ctx, double t);

// Retrieved field at the cell entrance (z = 0) at read time t, composed from
// the spin wave at the handoff time xi smeared by the Gaussian retrieval
// kernel. Returns an empty expansion when the read drive vanishes at t.
// include_noise_terms appends the retrieval-stage Langevin terms (diagnostic
// only; the signal path excludes them).
FieldExpansion expand_read_field(const Scenario& scn, const WriteKernelContext& wctx,
                                 const ReadKernelContext& rctx, double t,
                                 bool include_noise_terms = false);

MomentRules moment_rules_for(const Scenario& scn, const WriteKernelContext& wctx);

} // namespace dlcz
