#pragma once

// Discretization of a majorized operator pair into integer-multiplicity
// profiles with residual certificates: flag coefficients average the top and
// bottom mass into equal trace slots, an interval partition of the essential
// band bins the remainder, and the dropped fractional mass is balanced and
// certified in an aligned actual-versus-approximant comparison.

#include <string>
#include <vector>

#include "opmaj/majorize.hpp"
#include "opmaj/spectral.hpp"

namespace opmaj {

struct Interval {
  Rat lo, hi;
  bool lo_closed = true;
  bool hi_closed = false;
  Rat gamma;            // representative value, inside the closure of the interval
  bool pinned = false;  // band-edge representative, exempt from adjustment
};

struct IntervalPartition {
  std::vector<Interval> cells;  // ascending, disjoint, covering the band
};

bool interval_contains(const Interval& iv, const Rat& v);

// Largest compact-part mass sitting above 1/m, over both operators and both
// ends (upper ends only in weak mode); zero promotes to one.
Rat choose_t(const StepOperator& a, const StepOperator& b, long long m, bool weak);

// Slot count guaranteeing that fractional and oscillation losses stay under
// 1/(3m) per side.
long long choose_N(const Rat& t, long long m, const Rat& norm_b);

// Slot averages of the upper scale over N equal slots of total length t,
// scaled back to values: alpha_j = (N/t)(U(jt/N) - U((j-1)t/N)).
// Non-increasing; requires a trace-compact operator.
std::vector<Rat> upper_coeffs(const StepOperator& x, const Rat& t, long long N);

// Band partition around the essential spectrum of b: one 1/m cell below, at
// least two middle cells of length at most 1/m (a single point cell when the
// band degenerates), one 1/m cell above. Representatives pin the band edges;
// interior cells snap to the largest essential atom they contain.
IntervalPartition build_partition(const StepOperator& b, long long m, bool weak);

struct CountRow {
  Weight mass;            // remainder mass inside the interval
  bool inf_count = false;
  long long count = 0;    // floor(mass N / t) when finite
  Rat remainder;          // mass - count (t/N), in [0, t/N)
};

// Bins what is left of x after consuming the top t (and bottom t unless
// both_flags is false) into the partition cells.
std::vector<CountRow> interval_counts(const StepOperator& x, const Rat& t,
                                      long long N, const IntervalPartition& part,
                                      bool both_flags);

struct SlackLine {
  std::string label;
  Rat eps, delta;
};

struct DiscretizationResult {
  Profile f, g;  // unit-trace-slot profiles of the two discretized operators
  long long m = 0;
  Rat t;
  long long N = 0;
  IntervalPartition part;
  std::vector<Rat> alpha_upper, alpha_lower;  // a-side flag values
  std::vector<Rat> beta_upper, beta_lower;    // b-side flag values
  std::vector<CountRow> counts_a, counts_b;
  Rat remainder_a, remainder_b;   // dropped fractional mass per side
  Rat remainder_total;            // balanced common value, max of the two
  Rat withheld_a, withheld_b;     // mass set aside to balance the other side
  FlaggedOperator actual_a, approx_a;  // aligned certificate cells
  FlaggedOperator actual_b, approx_b;
  NbhdCert cert_a, cert_b;
  std::vector<SlackLine> slack_ledger;
  bool weak = false;
};

// Requires ambient operators with a majorizing (weak: weakly majorizing,
// both positive) relation; produces profiles with the same relation, exact,
// plus membership certificates for both approximations, escalating the
// certificate radius at most to (2/m, 2/m).
DiscretizationResult discretize_pair(const StepOperator& a, const StepOperator& b,
                                     long long m, bool weak);

// Membership of the aligned difference X - A in the (eps, delta) operator
// neighborhood of zero.
NbhdCert residual_certificate(const FlaggedOperator& X, const FlaggedOperator& A,
                              const Rat& eps, const Rat& delta);

}  // namespace opmaj
