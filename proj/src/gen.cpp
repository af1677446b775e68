#include "opmaj/gen.hpp"

#include <algorithm>
#include <numeric>

namespace opmaj {

double runif(Rng& rng) {
  return (double)(rng() >> 11) * (1.0 / 9007199254740992.0);
}

long long rint_in(Rng& rng, long long lo, long long hi) {
  return lo + (long long)(rng() % (unsigned long long)(hi - lo + 1));
}

Rat rand_rat(Rng& rng, long long max_abs, long long max_den) {
  long long den = rint_in(rng, 1, max_den);
  long long num = rint_in(rng, -max_abs * den, max_abs * den);
  return rat_ll(num) / rat_ll(den);
}

Rat rand_rat_nonneg(Rng& rng, long long max_abs, long long max_den) {
  long long den = rint_in(rng, 1, max_den);
  long long num = rint_in(rng, 0, max_abs * den);
  return rat_ll(num) / rat_ll(den);
}

StepOperator rand_ambient(Rng& rng, bool positive) {
  std::vector<Atom> atoms;
  long long nf = rint_in(rng, 2, 5);
  long long ni = rint_in(rng, 1, 2);
  for (long long i = 0; i < nf; ++i) {
    long long den = rint_in(rng, 1, 8);
    Rat w = rat_ll(rint_in(rng, 1, 3 * den)) / rat_ll(den);
    Rat v = positive ? rand_rat_nonneg(rng) : rand_rat(rng);
    atoms.push_back(Atom{v, Weight(w)});
  }
  for (long long i = 0; i < ni; ++i) {
    Rat v = positive ? rand_rat_nonneg(rng) : rand_rat(rng);
    atoms.push_back(Atom{v, Weight::inf()});
  }
  return make_operator(atoms, Ambient::Inf);
}

StepOperator flag_average(const StepOperator& op) {
  std::vector<Atom> out;
  std::size_t i = 0;
  while (i < op.atoms.size()) {
    if (op.atoms[i].weight.is_inf()) {
      out.push_back(op.atoms[i]);
      ++i;
      continue;
    }
    Rat mass = 0, moment = 0;
    std::size_t j = i;
    while (j < op.atoms.size() && !op.atoms[j].weight.is_inf()) {
      mass += op.atoms[j].weight.fin();
      moment += op.atoms[j].value * op.atoms[j].weight.fin();
      ++j;
    }
    out.push_back(Atom{moment / mass, Weight(mass)});
    i = j;
  }
  return make_operator(out, op.ambient);
}

std::pair<StepOperator, StepOperator> rand_majorized_pair(Rng& rng) {
  StepOperator b = rand_ambient(rng, false);
  StepOperator a = flag_average(b);
  if (!majorizes(a, b))
    fail(Kind::InternalInvariantViolation, "averaged pair lost the order");
  return {a, b};
}

std::pair<StepOperator, StepOperator> rand_weak_pair(Rng& rng) {
  StepOperator b = rand_ambient(rng, true);
  long long den = rint_in(rng, 1, 8);
  Rat sigma = rat_ll(rint_in(rng, 1, den)) / rat_ll(den);
  StepOperator a = scale_op(flag_average(b), sigma);
  if (!submajorizes(a, b))
    fail(Kind::InternalInvariantViolation, "shrunk pair lost the weak order");
  return {a, b};
}

Profile rand_profile(Rng& rng, long long max_values, long long max_total,
                     bool ambient) {
  long long nv = rint_in(rng, 1, max_values);
  long long cap = std::max<long long>(1, max_total / nv);
  std::vector<PEntry> es;
  for (long long i = 0; i < nv; ++i)
    es.push_back(PEntry{rand_rat(rng), false, rint_in(rng, 1, cap)});
  if (ambient) es.push_back(PEntry{rand_rat(rng), true, 0});
  return make_profile(std::move(es), ambient);
}

std::vector<Rat> rand_vec(Rng& rng, std::size_t n, bool nonneg) {
  std::vector<Rat> v(n);
  for (Rat& x : v) x = nonneg ? rand_rat_nonneg(rng) : rand_rat(rng);
  return v;
}

namespace {

// In-place product of random exact T-transforms.
void mix(Rng& rng, std::vector<Rat>& x, long long steps) {
  const std::size_t n = x.size();
  if (n < 2) return;
  for (long long s = 0; s < steps; ++s) {
    std::size_t i = (std::size_t)rint_in(rng, 0, (long long)n - 1);
    std::size_t j = (std::size_t)rint_in(rng, 0, (long long)n - 1);
    if (i == j) continue;
    long long den = rint_in(rng, 1, 8);
    Rat lam = rat_ll(rint_in(rng, 0, den)) / rat_ll(den);
    Rat xi = x[i], xj = x[j];
    x[i] = lam * xi + (Rat(1) - lam) * xj;
    x[j] = (Rat(1) - lam) * xi + lam * xj;
  }
}

}  // namespace

std::pair<std::vector<Rat>, std::vector<Rat>> rand_vec_majorized(Rng& rng,
                                                                 std::size_t n) {
  std::vector<Rat> y = rand_vec(rng, n, false);
  std::vector<Rat> x = y;
  mix(rng, x, rint_in(rng, 1, 2 * (long long)n));
  if (!vec_majorizes(x, y))
    fail(Kind::InternalInvariantViolation, "mixed pair lost the order");
  return {x, y};
}

std::pair<std::vector<Rat>, std::vector<Rat>> rand_vec_weak(Rng& rng,
                                                            std::size_t p,
                                                            std::size_t q) {
  std::vector<Rat> g = rand_vec(rng, q, true);
  std::vector<Rat> top = g;
  std::sort(top.begin(), top.end(), [](const Rat& a, const Rat& b) { return a > b; });
  std::vector<Rat> f(p, Rat(0));
  for (std::size_t i = 0; i < p && i < q; ++i) f[i] = top[i];
  mix(rng, f, rint_in(rng, 1, 2 * (long long)p));
  long long den = rint_in(rng, 1, 8);
  Rat sigma = rat_ll(rint_in(rng, 1, den)) / rat_ll(den);
  for (Rat& v : f) v *= sigma;
  if (!vec_submajorizes(f, g))
    fail(Kind::InternalInvariantViolation, "shrunk pair lost the weak order");
  return {f, g};
}

RatMat rand_doubly_stochastic(Rng& rng, std::size_t n, int terms) {
  int k = (int)rint_in(rng, 1, terms);
  std::vector<Rat> coeffs((std::size_t)k);
  Rat tot = 0;
  for (Rat& c : coeffs) {
    c = rat_ll(rint_in(rng, 1, 16));
    tot += c;
  }
  for (Rat& c : coeffs) c /= tot;
  RatMat D(n, std::vector<Rat>(n, Rat(0)));
  std::vector<int> perm(n);
  for (std::size_t t = 0; t < (std::size_t)k; ++t) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i)
      std::swap(perm[i - 1], perm[(std::size_t)rint_in(rng, 0, (long long)i - 1)]);
    for (std::size_t r = 0; r < n; ++r)
      D[r][(std::size_t)perm[r]] += coeffs[t];
  }
  return D;
}

Mat rand_symmetric(Rng& rng, std::size_t n) {
  Mat A(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double v = 2.0 * runif(rng) - 1.0;
      A[i][j] = A[j][i] = v;
    }
  return A;
}

}  // namespace opmaj
