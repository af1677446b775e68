#pragma once

// Step operators (finite lists of spectral atoms in a traced ambient), their
// decreasing/increasing rearrangement scales, the piecewise linear integrals
// of those scales, neighborhood certificates, and flag-aligned cell lists.

#include <utility>
#include <vector>

#include "opmaj/rational.hpp"

namespace opmaj {

enum class Ambient { Inf, Fin };

struct Atom {
  Rat value;
  Weight weight;
};

// Canonical form: values strictly descending, equal values merged, no zero
// weights. Ambient Inf requires at least one infinite atom; Fin requires all
// weights finite.
struct StepOperator {
  std::vector<Atom> atoms;
  Ambient ambient = Ambient::Inf;
};

enum class Monotone { NonIncreasing, NonDecreasing };

struct ScalePiece {
  Weight duration;  // > 0; infinite only on the last piece
  Rat value;
};

// Right-continuous step function on [0, inf). The last piece always has
// infinite duration: finite-trace operators clamp at their last value.
struct StepScale {
  std::vector<ScalePiece> pieces;
  Monotone monotone = Monotone::NonIncreasing;
  Rat value_at(const Rat& t) const;
  const Rat& tail_value() const { return pieces.back().value; }
};

struct Knot {
  Rat t;
  Rat y;
};

// Continuous piecewise linear function from (0,0) with a linear tail.
struct PLFunction {
  std::vector<Knot> knots;  // first knot (0,0), t strictly increasing
  Rat tail_slope;
  Rat eval(const Rat& t) const;
  const Rat& last_t() const { return knots.back().t; }
};

// Membership certificate for the two-parameter neighborhoods: member iff the
// spectral mass at |value| >= eps is strictly below delta.
struct NbhdCert {
  Rat eps;
  Rat delta;
  Weight bad_mass;
  bool member;
};

struct FlagCell {
  Rat value;
  Weight weight;
};

// Ordered list of cells along a flag. Unlike StepOperator the order carries
// meaning: cell k of one flag aligns with cell k of another after refinement.
struct FlaggedOperator {
  std::vector<FlagCell> cells;
};

// Validation + canonicalization. Throws InvalidAtom (zero weight),
// AmbientMismatch (tag inconsistent with the weights), InvalidInput (empty).
StepOperator make_operator(std::vector<Atom> atoms, Ambient ambient);
StepOperator normalize(const StepOperator& op);

StepOperator negate_op(const StepOperator& op);
StepOperator abs_op(const StepOperator& op);
StepOperator shift_op(const StepOperator& op, const Rat& c);  // values + c
StepOperator scale_op(const StepOperator& op, const Rat& c);  // c >= 0
Weight total_weight(const StepOperator& op);
Rat sup_norm(const StepOperator& op);  // max |value|
bool is_positive(const StepOperator& op);

// lambda_t: descending rearrangement. The first infinite atom absorbs the
// tail, so lambda never drops below the largest infinite-weight value.
StepScale upper_scale(const StepOperator& op);
// mu_t = -lambda_t(-op): ascending view, non-decreasing.
StepScale lower_scale(const StepOperator& op);
// nu_t = lambda_t(|op|).
StepScale singular_scale(const StepOperator& op);

// Integral from 0; exact piecewise linear output.
PLFunction integrate_scale(const StepScale& s);
PLFunction u_fn(const StepOperator& op);  // integral of upper scale, concave
PLFunction l_fn(const StepOperator& op);  // integral of lower scale, convex

// (ess_min, ess_max) over infinite-weight atoms. Inf ambient only;
// NoEssentialSpectrum for finite-trace operators.
std::pair<Rat, Rat> ess_bounds(const StepOperator& op);

// (upper part, lower part): (op - ess_max)^+ and (ess_min - op)^+, both
// positive tau-compact. Satisfies u_fn(op)(t) = u_fn(upper)(t) + t*ess_max
// and l_fn(op)(t) = -u_fn(lower)(t) + t*ess_min exactly.
std::pair<StepOperator, StepOperator> compact_parts(const StepOperator& op);

// Integral of the singular scale up to s (s >= 0).
Rat ks_norm(const StepOperator& op, const Rat& s);

Weight trace_norm(const StepOperator& op);
// Signed trace; IndeterminateTrace when both signed parts are infinite.
XRat trace(const StepOperator& op);

// Inf ambient: every infinite atom sits at value 0. Fin: vacuously true.
bool is_tau_compact(const StepOperator& op);
bool is_trace_class(const StepOperator& op);

NbhdCert in_nbhd(const StepOperator& op, const Rat& eps, const Rat& delta);

// Cells of the canonical descending atom list.
FlaggedOperator flag_of(const StepOperator& op);
// Merge cells into an operator; ambient inferred from the total weight.
StepOperator op_of_flag(const FlaggedOperator& f);

// Cellwise difference along the common refinement of two flags. Infinite
// cells split against finite ones; a trailing infinite cell absorbs the other
// side's remaining cells. Misaligned lists raise FlagMismatch.
FlaggedOperator flag_sub(const FlaggedOperator& x, const FlaggedOperator& y);
// Cellwise convex combination gamma*x + (1-gamma)*y, gamma in [0,1].
FlaggedOperator flag_combine(const Rat& gamma, const FlaggedOperator& x,
                             const FlaggedOperator& y);

// Operator whose upper scale is upper_scale(x) + pad pointwise. x must be
// positive tau-compact; pad non-increasing, nonnegative, not identically 0.
// A pad with positive tail is accepted; the result is then not tau-compact.
StepOperator spectral_pad(const StepOperator& x, const StepScale& pad);

}  // namespace opmaj
