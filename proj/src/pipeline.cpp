#include "opmaj/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace opmaj {

namespace {

constexpr long long kWindowCap = 2000000;

std::vector<Rat> top_of(const Profile& p, long long T) {
  std::vector<Rat> out;
  out.reserve((std::size_t)T);
  for (const PEntry& e : p.entries) {
    long long room = T - (long long)out.size();
    if (room == 0) break;
    long long take = e.inf_mult ? room : std::min(e.mult, room);
    for (long long i = 0; i < take; ++i) out.push_back(e.value);
  }
  if ((long long)out.size() != T)
    fail(Kind::InternalInvariantViolation, "ambient profile shorter than window");
  return out;
}

Rat sum_of(const std::vector<Rat>& v) {
  Rat s = 0;
  for (const Rat& x : v) s += x;
  return s;
}

std::pair<Rat, Rat> sum_chain(const std::vector<ChainLine>& chain) {
  Rat e = 0, d = 0;
  for (const ChainLine& c : chain) {
    e += c.eps;
    d += c.delta;
  }
  return {e, d};
}

}  // namespace

std::pair<Rat, Rat> RunReport::recompute_claim() const { return sum_chain(chain); }

std::pair<Rat, Rat> ContractiveReport::recompute_claim() const {
  return sum_chain(chain);
}

WindowOut truncate_to(const Profile& f, const Profile& g, long long T) {
  if (!f.ambient || !g.ambient)
    fail(Kind::AmbientMismatch, "window extraction needs ambient profiles");
  if (T < 1) fail(Kind::InvalidInput, "window size must be positive");
  if (T > kWindowCap) fail(Kind::OutOfRange, "window too large to materialize");
  if (!prof_majorizes(f, g))
    fail(Kind::NotMajorized, "window extraction needs an exact majorization");
  WindowOut w;
  w.T = T;
  w.x = top_of(f, T);
  std::vector<Rat> y0 = top_of(g, T);
  // Inventory of g past its top T, ascending, infinite entries inexhaustible.
  std::vector<PEntry> inv;
  long long left = T;
  for (const PEntry& e : g.entries) {
    if (left > 0) {
      if (e.inf_mult) {
        inv.push_back(e);
        left = 0;
      } else {
        long long take = std::min(e.mult, left);
        left -= take;
        if (e.mult > take) inv.push_back(PEntry{e.value, false, e.mult - take});
      }
    } else {
      inv.push_back(e);
    }
  }
  std::reverse(inv.begin(), inv.end());
  Rat sum_x = sum_of(w.x);
  Rat cur = sum_of(y0);
  if (cur < sum_x)
    fail(Kind::InternalInvariantViolation, "window prefix sums inverted");
  std::size_t ii = 0;
  long long taken = 0;
  auto draw = [&]() -> Rat {
    while (ii < inv.size() && !inv[ii].inf_mult && taken == inv[ii].mult) {
      ++ii;
      taken = 0;
    }
    if (ii >= inv.size())
      fail(Kind::InternalInvariantViolation, "replacement inventory exhausted");
    ++taken;
    return inv[ii].value;
  };
  // Swap the smallest kept entries for the smallest leftovers until the
  // sums meet; the last kept entry absorbs any overshoot. The lower
  // integrals of g sit below those of f, so the walk always lands.
  long long s = 0;
  std::vector<Rat> repl;  // ascending
  while (cur != sum_x) {
    if (s == T)
      fail(Kind::InternalInvariantViolation, "window sums never met");
    Rat iv = draw();
    Rat cand = cur - y0[(std::size_t)(T - 1 - s)] + iv;
    if (cand < sum_x) break;
    repl.push_back(iv);
    cur = cand;
    ++s;
  }
  w.y.assign(y0.begin(), y0.begin() + (std::size_t)(T - s));
  if (cur > sum_x) {
    w.y.back() -= cur - sum_x;
    w.defects = 1;
  }
  for (auto it = repl.rbegin(); it != repl.rend(); ++it) w.y.push_back(*it);
  if (!vec_majorizes(w.x, w.y))
    fail(Kind::InternalInvariantViolation, "window lost the majorization");
  return w;
}

RunReport sh_approximate(const StepOperator& a, const StepOperator& b,
                         long long m, long long T) {
  DiscretizationResult disc = discretize_pair(a, b, m, false);
  WindowOut win = truncate_to(disc.f, disc.g, T);
  HornOut horn = horn_construct(win.x, win.y);
  RunReport R;
  R.m = m;
  R.T = T;
  R.t = disc.t;
  R.N = disc.N;
  R.x = win.x;
  R.y = win.y;
  R.U = horn.U;
  std::vector<double> yd(win.y.size());
  for (std::size_t i = 0; i < yd.size(); ++i) yd[i] = rat_dbl(win.y[i]);
  Mat A = sym_conj(R.U, yd);
  double derr = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i)
    derr = std::max(derr, std::fabs(A[i][i] - rat_dbl(win.x[i])));
  R.diag_err = derr;
  Mat G = mat_mul(R.U, mat_transpose(R.U));
  double oerr = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i)
    for (std::size_t j = 0; j < G.size(); ++j)
      oerr = std::max(oerr, std::fabs(G[i][j] - (i == j ? 1.0 : 0.0)));
  R.orth_defect = oerr;
  for (const SlackLine& sl : disc.slack_ledger)
    R.chain.push_back(ChainLine{sl.label, sl.eps, sl.delta});
  R.chain.push_back(
      ChainLine{"alignment-corner", Rat(0), Rat(2) * disc.remainder_total});
  R.chain.push_back(ChainLine{"truncation", Rat(0),
                              Rat(win.defects) * disc.t / rat_ll(disc.N)});
  R.chain.push_back(ChainLine{"matrix", rat_of_double(derr), Rat(0)});
  auto fin = R.recompute_claim();
  R.eps_final = fin.first;
  R.delta_final = fin.second;
  Rat hm = Rat(1) / rat_ll(m);
  R.pass = derr < rat_dbl(hm) + 1e-8 && R.eps_final <= Rat(3) * hm &&
           R.delta_final <= Rat(4) * hm && oerr < 1e-9;
  return R;
}

ContractiveReport contractive_approximate(const StepOperator& a,
                                          const StepOperator& b, long long m,
                                          const Rat& eps, long long T) {
  if (eps <= 0) fail(Kind::InvalidInput, "dilation needs eps > 0");
  DiscretizationResult disc = discretize_pair(a, b, m, true);
  auto dil = double_dilate(disc.f, disc.g, eps);
  WindowOut win = truncate_to(dil.first, dil.second, T);
  HornOut horn = horn_construct(win.x, win.y);
  ContractiveReport R;
  R.m = m;
  R.T = T;
  R.eps = eps;
  R.t = disc.t;
  R.N = disc.N;
  R.f_target.reserve(win.x.size());
  for (const Rat& v : win.x) R.f_target.push_back(v - eps);
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < win.y.size(); ++j)
    if (win.y[j] >= eps) keep.push_back(j);
  R.g_kept.reserve(keep.size());
  for (std::size_t j : keep) R.g_kept.push_back(win.y[j] - eps);
  R.C.assign(win.x.size(), std::vector<double>(keep.size(), 0.0));
  for (std::size_t i = 0; i < win.x.size(); ++i)
    for (std::size_t c = 0; c < keep.size(); ++c)
      R.C[i][c] = horn.U[i][keep[c]];
  std::vector<double> gk(R.g_kept.size());
  for (std::size_t c = 0; c < gk.size(); ++c) gk[c] = rat_dbl(R.g_kept[c]);
  double derr = 0.0;
  for (std::size_t i = 0; i < R.C.size(); ++i) {
    double r = 0.0;
    for (std::size_t c = 0; c < gk.size(); ++c)
      r += R.C[i][c] * R.C[i][c] * gk[c];
    derr = std::max(derr, std::fabs(r - rat_dbl(R.f_target[i])));
  }
  R.diag_err = derr;
  R.sigma = R.g_kept.empty() ? 0.0 : sigma_max(R.C);
  for (const SlackLine& sl : disc.slack_ledger)
    R.chain.push_back(ChainLine{sl.label, sl.eps, sl.delta});
  R.chain.push_back(ChainLine{"dilation", eps, Rat(0)});
  R.chain.push_back(
      ChainLine{"alignment-corner", Rat(0), Rat(2) * disc.remainder_total});
  R.chain.push_back(ChainLine{"truncation", Rat(0),
                              Rat(win.defects) * disc.t / rat_ll(disc.N)});
  R.chain.push_back(ChainLine{"matrix-compression", rat_of_double(derr), Rat(0)});
  auto fin = R.recompute_claim();
  R.eps_final = fin.first;
  R.delta_final = fin.second;
  R.pass = derr < 3.0 * rat_dbl(eps) && R.sigma <= 1.0 + 1e-9;
  return R;
}

std::pair<StepOperator, StepOperator> split_signed(const StepOperator& x) {
  std::vector<Atom> pos, neg;
  Weight rest_pos, rest_neg;
  for (const Atom& at : x.atoms) {
    if (at.value > 0) {
      pos.push_back(at);
      rest_neg += at.weight;
    } else if (at.value < 0) {
      neg.push_back(Atom{-at.value, at.weight});
      rest_pos += at.weight;
    } else {
      rest_pos += at.weight;
      rest_neg += at.weight;
    }
  }
  if (!rest_pos.is_zero()) pos.push_back(Atom{Rat(0), rest_pos});
  if (!rest_neg.is_zero()) neg.push_back(Atom{Rat(0), rest_neg});
  return {make_operator(pos, x.ambient), make_operator(neg, x.ambient)};
}

bool l1_check(const StepOperator& a, const StepOperator& b) {
  XRat ta = trace(a);
  XRat tb = trace(b);
  return majorizes(a, b) && xeq(ta, tb);
}

bool l1_weak_equiv(const StepOperator& a, const StepOperator& b) {
  if (a.ambient != Ambient::Inf || b.ambient != Ambient::Inf)
    fail(Kind::AmbientMismatch, "weak-strong coincidence is an ambient statement");
  if (!is_positive(a) || !is_positive(b))
    fail(Kind::RequiresPositive, "weak-strong coincidence needs positive operators");
  if (!is_trace_class(b))
    fail(Kind::InvalidInput, "weak-strong coincidence needs a trace-class right side");
  bool sub = submajorizes(a, b);
  bool maj = majorizes(a, b);
  if (sub != maj)
    fail(Kind::InternalInvariantViolation, "weak and strong orders disagree");
  return sub;
}

Weight hinge_trace(const StepOperator& x, const Rat& c, Hinge side) {
  Weight acc;
  for (const Atom& at : x.atoms) {
    if (side == Hinge::Upper) {
      if (at.value > c) acc += wmul(at.weight, at.value - c);
    } else {
      if (at.value < c) acc += wmul(at.weight, c - at.value);
    }
  }
  return acc;
}

DsOut doubly_stochastic_report(const Mat& U, const std::vector<Rat>& x,
                               const std::vector<Rat>& y) {
  const std::size_t n = U.size();
  if (n == 0 || x.size() != n || y.size() != n)
    fail(Kind::InvalidInput, "realizer and window sizes disagree");
  for (const auto& row : U)
    if (row.size() != n) fail(Kind::InvalidInput, "realizer is not square");
  DsOut out;
  out.D.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.D[i][j] = U[i][j] * U[i][j];
  for (std::size_t i = 0; i < n; ++i) {
    double rs = 0.0, cs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      rs += out.D[i][j];
      cs += out.D[j][i];
    }
    out.row_err = std::max(out.row_err, std::fabs(rs - 1.0));
    out.col_err = std::max(out.col_err, std::fabs(cs - 1.0));
  }
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += out.D[i][j] * rat_dbl(y[j]);
    out.transport_err = std::max(out.transport_err, std::fabs(r - rat_dbl(x[i])));
  }
  out.rows_ok = out.row_err <= 1e-9;
  out.cols_ok = out.col_err <= 1e-9;
  out.transport_ok = out.transport_err <= 1e-8;
  out.ok = out.rows_ok && out.cols_ok && out.transport_ok;
  return out;
}

}  // namespace opmaj
