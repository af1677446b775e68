#pragma once

// End-to-end runs: discretize a majorized pair, cut an exact finite window
// out of the profiles, realize the window with an orthogonal (or contracted)
// rotation product, and account every approximation step in an exact
// rational error chain.

#include <string>
#include <utility>
#include <vector>

#include "opmaj/discretize.hpp"
#include "opmaj/finite.hpp"

namespace opmaj {

// One accounted contribution to the final claim: a value budget (eps) and a
// mass budget (delta), both exact.
struct ChainLine {
  std::string label;
  Rat eps, delta;
};

// Finite window of size T cut from an exactly majorized profile pair.
// x and y are descending, share length T and total, and vec_majorizes(x, y)
// holds exactly. defects counts entries of y that were adjusted to close the
// trace gap (at most one).
struct WindowOut {
  std::vector<Rat> x, y;
  long long T = 0;
  int defects = 0;
};
WindowOut truncate_to(const Profile& f, const Profile& g, long long T);

// Full pipeline on an exactly majorized ambient pair: discretize at
// resolution m, window to T slots, rotate the window spectrum onto its
// target diagonal. The claim is a window claim: it covers the T inspected
// slots, with the chain bounding every replacement made on the way there.
struct RunReport {
  long long m = 0;
  long long T = 0;
  Rat t;            // flag mass consumed at each spectral end
  long long N = 0;  // slot count used by the discretization
  std::vector<ChainLine> chain;
  Rat eps_final, delta_final;  // column sums of the chain
  std::vector<Rat> x, y;       // window target and window spectrum
  Mat U;                       // orthogonal realizer for the window
  double diag_err = 0.0;       // max |diag(U diag(y) U^T) - x|
  double orth_defect = 0.0;    // max |U U^T - I|
  bool pass = false;
  std::pair<Rat, Rat> recompute_claim() const;
};
RunReport sh_approximate(const StepOperator& a, const StepOperator& b,
                         long long m, long long T);

// Weak variant: positive weakly majorized pair, dilated by eps into an
// exactly majorized pair, windowed, rotated, then compressed back by
// dropping the padding columns. C is a T x k contraction whose rows realize
// the target within [0, eps] plus float slack.
struct ContractiveReport {
  long long m = 0;
  long long T = 0;
  Rat eps;
  Rat t;
  long long N = 0;
  std::vector<ChainLine> chain;
  Rat eps_final, delta_final;
  std::vector<Rat> f_target;  // window target minus eps, length T
  std::vector<Rat> g_kept;    // surviving spectrum minus eps, length k
  Mat C;                      // T x k, sigma_max at most 1
  double diag_err = 0.0;      // max |diag(C diag(g_kept) C^T) - f_target|
  double sigma = 0.0;
  bool pass = false;
  std::pair<Rat, Rat> recompute_claim() const;
};
ContractiveReport contractive_approximate(const StepOperator& a,
                                          const StepOperator& b, long long m,
                                          const Rat& eps, long long T);

// Positive and negative parts; each keeps the complementary mass as an atom
// at zero so traces and ambients are preserved.
std::pair<StepOperator, StepOperator> split_signed(const StepOperator& x);

// Majorization plus exact trace equality. Surfaces IndeterminateTrace when
// a trace does not converge.
bool l1_check(const StepOperator& a, const StepOperator& b);

// For positive a and positive trace-class b the weak and strong orders
// coincide (every lower integral against b vanishes); returns the common
// verdict and insists on the coincidence.
bool l1_weak_equiv(const StepOperator& a, const StepOperator& b);

enum class Hinge { Upper, Lower };

// Integral of the hinge (v - c)_+ (Upper) or (c - v)_+ (Lower) against the
// spectral weights; infinite when an infinite atom sits strictly beyond c.
Weight hinge_trace(const StepOperator& x, const Rat& c, Hinge side);

// Squared-entry matrix of an orthogonal realizer, with row/column sums and
// the transport identity D y = x checked in floating point.
struct DsOut {
  Mat D;
  double row_err = 0.0, col_err = 0.0, transport_err = 0.0;
  bool rows_ok = false, cols_ok = false, transport_ok = false;
  bool ok = false;
};
DsOut doubly_stochastic_report(const Mat& U, const std::vector<Rat>& x,
                               const std::vector<Rat>& y);

}  // namespace opmaj
