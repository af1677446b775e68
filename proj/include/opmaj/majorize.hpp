#pragma once

// Majorization orders: piecewise linear dominance for operator scales,
// profiles (value/multiplicity sequences) with their partial-sum calculus,
// the dilation and padding constructions that convert weak majorization into
// full majorization at vector level, and the averaging inequality check.

#include <optional>
#include <vector>

#include "opmaj/spectral.hpp"

namespace opmaj {

// Sequence entry: a value with a positive integer or infinite multiplicity.
struct PEntry {
  Rat value;
  bool inf_mult = false;
  long long mult = 0;  // meaningful iff !inf_mult
};

// Canonical form: values strictly descending, equal values merged. Ambient
// profiles have infinite total multiplicity (at least one infinite entry);
// finite-tag profiles have none. The tag is part of the type: mixing the two
// in comparisons is an error, not a silent reinterpretation.
struct Profile {
  std::vector<PEntry> entries;
  bool ambient = true;
};

Profile make_profile(std::vector<PEntry> entries, bool ambient);
Profile profile_of_vector(const std::vector<Rat>& v);  // finite tag
Profile negate_profile(const Profile& f);
Profile shift_profile(const Profile& f, const Rat& c);
long long total_mult(const Profile& f);  // finite tag only

// Partial sums S_k of the k largest entries, recorded at block ends and
// linear in between; beyond the last break S_k grows by tail_increment per
// step (the largest infinite-multiplicity value).
struct SBreak {
  long long k;
  Rat S;
};
struct SeqPartialSums {
  std::vector<SBreak> breaks;
  Rat tail_increment;
};

// Sum of the k largest entries (k >= 1). Finite-tag profiles error with
// OutOfRange when k exceeds the total multiplicity.
Rat prof_U(const Profile& f, long long k);
// Sum of the k smallest entries.
Rat prof_L(const Profile& f, long long k);
SeqPartialSums prof_U_fn(const Profile& f);  // ambient only
SeqPartialSums prof_L_fn(const Profile& f);  // ambient only
PLFunction pl_of_sums(const SeqPartialSums& s);

// F <= G on all of [0, inf). Exact: compares at the union of knot abscissae
// and then the tail slopes; no sampling is involved.
bool pl_dominates(const PLFunction& F, const PLFunction& G);
// A point where F > G when dominance fails (exact witness), else nullopt.
std::optional<Rat> pl_dominates_witness(const PLFunction& F, const PLFunction& G);
// F <= G on [0, W] only (finite-trace comparisons).
bool pl_dominates_upto(const PLFunction& F, const PLFunction& G, const Rat& W);

// Spectral majorization: upper integrals dominated and lower integrals
// reverse-dominated. Finite-trace pairs compare on [0, total] and must have
// equal totals (AmbientMismatch otherwise); mixed ambients are an error.
bool majorizes(const StepOperator& a, const StepOperator& b);
// Upper side only.
bool submajorizes(const StepOperator& a, const StepOperator& b);

// Both ambient; integer dominance of partial sums, decided exactly through
// the piecewise linear embedding.
bool prof_majorizes(const Profile& f, const Profile& g);
bool prof_submajorizes(const Profile& f, const Profile& g);

// (f + eps with an eps-tail, g + eps with a zero-tail): turns nonnegative
// weak majorization into full majorization, exactly.
std::pair<Profile, Profile> double_dilate(const Profile& f, const Profile& g,
                                          const Rat& eps);

// Materializes a weakly majorized nonnegative pair as equal-length vectors
// with full majorization and exact sum equality: entries shifted by eps,
// the left side padded with eps blocks, the right side with eps blocks, one
// exactly adjusted entry and zeros. T = max(p,q) + ceil((sum g - sum f)/eps).
struct TruncOut {
  std::vector<Rat> x, y;
  long long T = 0;
};
TruncOut truncate_balanced(const Profile& f, const Profile& g, const Rat& eps);

// Averaging inequality: sum alpha_j y_j <= sum of the k largest y_j whenever
// 0 <= alpha_j <= 1, sum alpha <= k, y non-increasing and nonnegative.
// Precondition violations are reported via pre_ok; the inequality flag is
// then unasserted.
struct KadisonOut {
  Rat lhs, rhs;
  bool holds = false;
  bool pre_ok = false;
};
KadisonOut kadison_check(const std::vector<Rat>& alpha, const std::vector<Rat>& y,
                         long long k);

// Classical vector majorization, exact: sorted prefix sums dominate and the
// totals agree. Lengths must match.
bool vec_majorizes(const std::vector<Rat>& x, const std::vector<Rat>& y);
// Weak variant: prefix dominance only. Unequal lengths are zero-padded,
// which requires nonnegative entries.
bool vec_submajorizes(const std::vector<Rat>& x, const std::vector<Rat>& y);

}  // namespace opmaj
