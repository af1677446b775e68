#include "opmaj/majorize.hpp"

#include <algorithm>
#include <set>

namespace opmaj {

namespace {

long long rat_ceil_ll(const Rat& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  if (!q.fits_slong_p()) fail(Kind::OutOfRange, "ceiling does not fit a machine integer");
  return q.get_si();
}

}  // namespace

Profile make_profile(std::vector<PEntry> entries, bool ambient) {
  if (entries.empty()) fail(Kind::InvalidInput, "profile needs at least one entry");
  for (const PEntry& e : entries) {
    if (!e.inf_mult && e.mult <= 0)
      fail(Kind::InvalidInput, "profile multiplicity must be positive");
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const PEntry& a, const PEntry& b) { return a.value > b.value; });
  std::vector<PEntry> merged;
  for (PEntry& e : entries) {
    if (!merged.empty() && merged.back().value == e.value) {
      PEntry& m = merged.back();
      if (e.inf_mult || m.inf_mult) {
        m.inf_mult = true;
        m.mult = 0;
      } else {
        m.mult += e.mult;
      }
    } else {
      merged.push_back(std::move(e));
    }
  }
  bool has_inf = std::any_of(merged.begin(), merged.end(),
                             [](const PEntry& e) { return e.inf_mult; });
  if (ambient && !has_inf)
    fail(Kind::AmbientMismatch, "ambient profile needs infinite total multiplicity");
  if (!ambient && has_inf)
    fail(Kind::AmbientMismatch, "finite profile cannot hold an infinite multiplicity");
  return Profile{std::move(merged), ambient};
}

Profile profile_of_vector(const std::vector<Rat>& v) {
  std::vector<PEntry> es;
  es.reserve(v.size());
  for (const Rat& r : v) es.push_back(PEntry{r, false, 1});
  return make_profile(std::move(es), false);
}

Profile negate_profile(const Profile& f) {
  std::vector<PEntry> es = f.entries;
  for (PEntry& e : es) e.value = -e.value;
  return make_profile(std::move(es), f.ambient);
}

Profile shift_profile(const Profile& f, const Rat& c) {
  std::vector<PEntry> es = f.entries;
  for (PEntry& e : es) e.value += c;
  return make_profile(std::move(es), f.ambient);
}

long long total_mult(const Profile& f) {
  if (f.ambient) fail(Kind::AmbientMismatch, "ambient profile has no finite total");
  long long n = 0;
  for (const PEntry& e : f.entries) n += e.mult;
  return n;
}

Rat prof_U(const Profile& f, long long k) {
  if (k < 1) fail(Kind::InvalidInput, "partial sum index must be positive");
  Rat S = 0;
  long long remaining = k;
  for (const PEntry& e : f.entries) {
    long long take = e.inf_mult ? remaining : std::min(e.mult, remaining);
    S += e.value * rat_ll(take);
    remaining -= take;
    if (remaining == 0) return S;
  }
  fail(Kind::OutOfRange, "partial sum index exceeds total multiplicity");
}

Rat prof_L(const Profile& f, long long k) {
  if (k < 1) fail(Kind::InvalidInput, "partial sum index must be positive");
  Rat S = 0;
  long long remaining = k;
  for (auto it = f.entries.rbegin(); it != f.entries.rend(); ++it) {
    long long take = it->inf_mult ? remaining : std::min(it->mult, remaining);
    S += it->value * rat_ll(take);
    remaining -= take;
    if (remaining == 0) return S;
  }
  fail(Kind::OutOfRange, "partial sum index exceeds total multiplicity");
}

SeqPartialSums prof_U_fn(const Profile& f) {
  if (!f.ambient) fail(Kind::AmbientMismatch, "partial sum sequence needs an ambient profile");
  SeqPartialSums out;
  long long k = 0;
  Rat S = 0;
  for (const PEntry& e : f.entries) {
    if (e.inf_mult) {
      // First infinite block absorbs every later index; smaller entries are
      // never selected by a top-k choice.
      out.tail_increment = e.value;
      return out;
    }
    k += e.mult;
    S += e.value * rat_ll(e.mult);
    out.breaks.push_back(SBreak{k, S});
  }
  fail(Kind::InternalInvariantViolation, "ambient profile without infinite block");
}

SeqPartialSums prof_L_fn(const Profile& f) {
  if (!f.ambient) fail(Kind::AmbientMismatch, "partial sum sequence needs an ambient profile");
  SeqPartialSums out;
  long long k = 0;
  Rat S = 0;
  for (auto it = f.entries.rbegin(); it != f.entries.rend(); ++it) {
    if (it->inf_mult) {
      out.tail_increment = it->value;
      return out;
    }
    k += it->mult;
    S += it->value * rat_ll(it->mult);
    out.breaks.push_back(SBreak{k, S});
  }
  fail(Kind::InternalInvariantViolation, "ambient profile without infinite block");
}

PLFunction pl_of_sums(const SeqPartialSums& s) {
  PLFunction F;
  F.knots.push_back(Knot{Rat(0), Rat(0)});
  for (const SBreak& b : s.breaks) F.knots.push_back(Knot{rat_ll(b.k), b.S});
  F.tail_slope = s.tail_increment;
  return F;
}

namespace {

std::vector<Rat> union_abscissae(const PLFunction& F, const PLFunction& G) {
  std::set<Rat> ts;
  for (const Knot& k : F.knots) ts.insert(k.t);
  for (const Knot& k : G.knots) ts.insert(k.t);
  return std::vector<Rat>(ts.begin(), ts.end());
}

}  // namespace

bool pl_dominates(const PLFunction& F, const PLFunction& G) {
  // Both functions are linear between consecutive union abscissae, so F <= G
  // at those points extends to the whole segment; the tail reduces to one
  // value comparison and one slope comparison.
  for (const Rat& t : union_abscissae(F, G)) {
    if (F.eval(t) > G.eval(t)) return false;
  }
  return F.tail_slope <= G.tail_slope;
}

std::optional<Rat> pl_dominates_witness(const PLFunction& F, const PLFunction& G) {
  std::vector<Rat> ts = union_abscissae(F, G);
  for (const Rat& t : ts) {
    if (F.eval(t) > G.eval(t)) return t;
  }
  if (F.tail_slope <= G.tail_slope) return std::nullopt;
  const Rat& L = ts.back();
  Rat cross = L + (G.eval(L) - F.eval(L)) / (F.tail_slope - G.tail_slope);
  return cross + 1;
}

bool pl_dominates_upto(const PLFunction& F, const PLFunction& G, const Rat& W) {
  if (W < 0) fail(Kind::InvalidInput, "comparison bound must be nonnegative");
  if (F.eval(W) > G.eval(W)) return false;
  for (const Rat& t : union_abscissae(F, G)) {
    if (t > W) break;
    if (F.eval(t) > G.eval(t)) return false;
  }
  return true;
}

bool majorizes(const StepOperator& a, const StepOperator& b) {
  if (a.ambient != b.ambient)
    fail(Kind::AmbientMismatch, "majorization compares operators of one ambient kind");
  PLFunction Ua = u_fn(a), Ub = u_fn(b);
  PLFunction La = l_fn(a), Lb = l_fn(b);
  if (a.ambient == Ambient::Fin) {
    Rat Wa = total_weight(a).fin();
    Rat Wb = total_weight(b).fin();
    if (Wa != Wb)
      fail(Kind::AmbientMismatch, "finite-trace majorization needs equal totals");
    return pl_dominates_upto(Ua, Ub, Wa) && pl_dominates_upto(Lb, La, Wa);
  }
  return pl_dominates(Ua, Ub) && pl_dominates(Lb, La);
}

bool submajorizes(const StepOperator& a, const StepOperator& b) {
  if (a.ambient != b.ambient)
    fail(Kind::AmbientMismatch, "majorization compares operators of one ambient kind");
  return pl_dominates(u_fn(a), u_fn(b));
}

bool prof_majorizes(const Profile& f, const Profile& g) {
  if (!f.ambient || !g.ambient)
    fail(Kind::AmbientMismatch, "profile majorization needs ambient profiles");
  return pl_dominates(pl_of_sums(prof_U_fn(f)), pl_of_sums(prof_U_fn(g))) &&
         pl_dominates(pl_of_sums(prof_L_fn(g)), pl_of_sums(prof_L_fn(f)));
}

bool prof_submajorizes(const Profile& f, const Profile& g) {
  if (!f.ambient || !g.ambient)
    fail(Kind::AmbientMismatch, "profile majorization needs ambient profiles");
  return pl_dominates(pl_of_sums(prof_U_fn(f)), pl_of_sums(prof_U_fn(g)));
}

std::pair<Profile, Profile> double_dilate(const Profile& f, const Profile& g,
                                          const Rat& eps) {
  if (eps <= 0) fail(Kind::InvalidInput, "dilation amount must be positive");
  if (!f.ambient || !g.ambient)
    fail(Kind::AmbientMismatch, "dilation needs ambient profiles");
  if (f.entries.back().value < 0 || g.entries.back().value < 0)
    fail(Kind::RequiresPositive, "dilation needs nonnegative profiles");
  if (!prof_submajorizes(f, g))
    fail(Kind::NotSubmajorized, "dilation needs weak majorization");
  std::vector<PEntry> fe = f.entries, ge = g.entries;
  for (PEntry& e : fe) e.value += eps;
  for (PEntry& e : ge) e.value += eps;
  fe.push_back(PEntry{eps, true, 0});
  ge.push_back(PEntry{Rat(0), true, 0});
  return {make_profile(std::move(fe), true), make_profile(std::move(ge), true)};
}

namespace {

// Finite-multiplicity entries expanded to a descending vector.
std::vector<Rat> finite_part(const Profile& f) {
  constexpr long long kCap = 2000000;
  std::vector<Rat> v;
  long long n = 0;
  for (const PEntry& e : f.entries) {
    if (e.inf_mult) continue;
    n += e.mult;
    if (n > kCap) fail(Kind::OutOfRange, "profile too large to materialize");
    for (long long i = 0; i < e.mult; ++i) v.push_back(e.value);
  }
  return v;
}

}  // namespace

TruncOut truncate_balanced(const Profile& f, const Profile& g, const Rat& eps) {
  if (eps <= 0) fail(Kind::InvalidInput, "padding amount must be positive");
  for (const Profile* p : {&f, &g}) {
    if (p->entries.back().value < 0)
      fail(Kind::RequiresPositive, "balanced padding needs nonnegative profiles");
    for (const PEntry& e : p->entries) {
      if (e.inf_mult && e.value != 0)
        fail(Kind::InvalidInput, "infinite multiplicity allowed only at value zero");
    }
  }
  std::vector<Rat> fv = finite_part(f);
  std::vector<Rat> gv = finite_part(g);
  long long p = (long long)fv.size(), q = (long long)gv.size();
  long long n = std::max(p, q);
  // Weak dominance of the finite parts, zero-padded to common length.
  Rat sf = 0, sg = 0;
  for (long long k = 0; k < n; ++k) {
    if (k < p) sf += fv[k];
    if (k < q) sg += gv[k];
    if (sf > sg) fail(Kind::NotSubmajorized, "left profile is not weakly majorized");
  }
  Rat D = sg - sf;
  long long T = n + (D == 0 ? 0 : rat_ceil_ll(D / eps));
  TruncOut out;
  out.T = T;
  out.x.reserve(T);
  for (const Rat& v : fv) out.x.push_back(v + eps);
  while ((long long)out.x.size() < T) out.x.push_back(eps);
  Rat E = rat_ll(T - q) * eps - D;
  if (E < 0) fail(Kind::InternalInvariantViolation, "negative padding budget");
  long long s = rat_floor_ll(E / eps);
  Rat partial = E - rat_ll(s) * eps;
  out.y.reserve(T);
  for (const Rat& v : gv) out.y.push_back(v + eps);
  for (long long i = 0; i < s; ++i) out.y.push_back(eps);
  if (partial > 0) out.y.push_back(partial);
  while ((long long)out.y.size() < T) out.y.push_back(Rat(0));
  if ((long long)out.y.size() != T)
    fail(Kind::InternalInvariantViolation, "padding overflow");
  if (!vec_majorizes(out.x, out.y))
    fail(Kind::InternalInvariantViolation, "padded pair fails majorization");
  return out;
}

KadisonOut kadison_check(const std::vector<Rat>& alpha, const std::vector<Rat>& y,
                         long long k) {
  if (alpha.size() != y.size()) fail(Kind::InvalidInput, "coefficient length mismatch");
  long long n = (long long)y.size();
  if (k < 1 || k > n) fail(Kind::OutOfRange, "rank bound outside 1..n");
  KadisonOut out;
  Rat asum = 0;
  bool pre = true;
  for (const Rat& a : alpha) {
    if (a < 0 || a > 1) pre = false;
    asum += a;
  }
  if (asum > rat_ll(k)) pre = false;
  for (size_t j = 0; j + 1 < y.size(); ++j) {
    if (y[j] < y[j + 1]) pre = false;
  }
  if (!y.empty() && y.back() < 0) pre = false;
  out.pre_ok = pre;
  out.lhs = 0;
  for (size_t j = 0; j < y.size(); ++j) out.lhs += alpha[j] * y[j];
  out.rhs = 0;
  for (long long j = 0; j < k; ++j) out.rhs += y[(size_t)j];
  out.holds = out.lhs <= out.rhs;
  return out;
}

bool vec_majorizes(const std::vector<Rat>& x, const std::vector<Rat>& y) {
  if (x.size() != y.size()) fail(Kind::InvalidInput, "vector length mismatch");
  if (x.empty()) fail(Kind::InvalidInput, "empty vectors");
  std::vector<Rat> xs = x, ys = y;
  std::sort(xs.rbegin(), xs.rend());
  std::sort(ys.rbegin(), ys.rend());
  Rat sx = 0, sy = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    if (sx > sy) return false;
  }
  return sx == sy;
}

bool vec_submajorizes(const std::vector<Rat>& x, const std::vector<Rat>& y) {
  if (x.empty() || y.empty()) fail(Kind::InvalidInput, "empty vectors");
  std::vector<Rat> xs = x, ys = y;
  if (xs.size() != ys.size()) {
    for (const Rat& v : xs)
      if (v < 0) fail(Kind::InvalidInput, "zero padding needs nonnegative entries");
    for (const Rat& v : ys)
      if (v < 0) fail(Kind::InvalidInput, "zero padding needs nonnegative entries");
    size_t n = std::max(xs.size(), ys.size());
    xs.resize(n, Rat(0));
    ys.resize(n, Rat(0));
  }
  std::sort(xs.rbegin(), xs.rend());
  std::sort(ys.rbegin(), ys.rend());
  Rat sx = 0, sy = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    if (sx > sy) return false;
  }
  return true;
}

}  // namespace opmaj
