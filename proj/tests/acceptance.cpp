// Acceptance gate: thirteen end-to-end criteria, one pass/fail line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <string>
#include <vector>

#include "opmaj/gen.hpp"
#include "opmaj/io.hpp"
#include "opmaj/pipeline.hpp"

using namespace opmaj;

namespace {

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

StepOperator inf_op(std::vector<Atom> atoms) {
  return make_operator(std::move(atoms), Ambient::Inf);
}

// Random positive tau-compact operator: finite atoms above an infinite rest
// at zero.
StepOperator rand_compact_pos(Rng& rng) {
  std::vector<Atom> atoms{{Rat(0), Weight::inf()}};
  long long n = rint_in(rng, 1, 5);
  for (long long i = 0; i < n; ++i) {
    Rat v = rand_rat_nonneg(rng, 3, 7) + Rat(1) / rat_ll(100 + i);
    Rat w = rand_rat_nonneg(rng, 2, 5) + Rat(1, 9);
    atoms.push_back(Atom{v, Weight(w)});
  }
  return make_operator(atoms, Ambient::Inf);
}

double orth_defect(const Mat& U) {
  Mat G = mat_mul(U, mat_transpose(U));
  double worst = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i)
    for (std::size_t j = 0; j < G.size(); ++j)
      worst = std::max(worst, std::fabs(G[i][j] - (i == j ? 1.0 : 0.0)));
  return worst;
}

bool crit_schur(std::string& note) {
  double t0 = now_s();
  Rng rng(101);
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t n = (std::size_t)rint_in(rng, 2, 8);
    if (!schur_check(rand_symmetric(rng, n))) {
      note = "schur_check false at rep " + std::to_string(rep);
      return false;
    }
  }
  double dt = now_s() - t0;
  note = "1000 cases, " + std::to_string(dt).substr(0, 5) + "s";
  return dt < 10.0;
}

bool crit_horn(std::string& note) {
  Rng rng(202);
  for (int rep = 0; rep < 500; ++rep) {
    std::size_t n = (std::size_t)rint_in(rng, 2, 8);
    auto [x, y] = rand_vec_majorized(rng, n);
    HornOut h = horn_construct(x, y);
    if (orth_defect(h.U) >= 1e-9) {
      note = "orthogonality defect at rep " + std::to_string(rep);
      return false;
    }
    std::vector<double> yd(n);
    for (std::size_t i = 0; i < n; ++i) yd[i] = rat_dbl(y[i]);
    Mat A = sym_conj(h.U, yd);
    for (std::size_t i = 0; i < n; ++i)
      if (std::fabs(A[i][i] - rat_dbl(x[i])) >= 1e-8) {
        note = "diagonal error at rep " + std::to_string(rep);
        return false;
      }
    std::vector<double> spec = jacobi_eig(A).eigvals;
    std::vector<double> ys = yd;
    std::sort(ys.rbegin(), ys.rend());
    for (std::size_t i = 0; i < n; ++i)
      if (std::fabs(spec[i] - ys[i]) >= 1e-8) {
        note = "spectrum moved at rep " + std::to_string(rep);
        return false;
      }
  }
  note = "500 pairs";
  return true;
}

bool crit_birkhoff(std::string& note) {
  Rng rng(303);
  for (int rep = 0; rep < 300; ++rep) {
    std::size_t n = (std::size_t)rint_in(rng, 2, 7);
    RatMat D = rand_doubly_stochastic(rng, n, (int)rint_in(rng, 2, 6));
    auto terms = birkhoff_decompose(D);
    if ((long long)terms.size() > (long long)(n - 1) * (long long)(n - 1) + 1) {
      note = "too many terms at rep " + std::to_string(rep);
      return false;
    }
    RatMat acc(n, std::vector<Rat>(n, Rat(0)));
    Rat csum = 0;
    for (const BirkTerm& t : terms) {
      csum += t.coeff;
      for (std::size_t i = 0; i < n; ++i) acc[i][(std::size_t)t.perm[i]] += t.coeff;
    }
    if (csum != Rat(1) || acc != D) {
      note = "reconstruction mismatch at rep " + std::to_string(rep);
      return false;
    }
  }
  note = "300 matrices, exact";
  return true;
}

bool crit_prof_subset(std::string& note) {
  Rng rng(404);
  int checked = 0;
  for (int rep = 0; rep < 150; ++rep) {
    Profile p = rand_profile(rng, 4, 12, false);
    std::vector<Rat> vals;
    for (const PEntry& e : p.entries)
      for (long long i = 0; i < e.mult; ++i) vals.push_back(e.value);
    std::size_t total = vals.size();
    if (total == 0 || total > 12) continue;
    std::vector<Rat> best_hi(total + 1), best_lo(total + 1);
    std::vector<bool> seen(total + 1, false);
    for (unsigned mask = 0; mask < (1u << total); ++mask) {
      Rat s = 0;
      unsigned k = 0;
      for (std::size_t j = 0; j < total; ++j)
        if (mask & (1u << j)) {
          s += vals[j];
          ++k;
        }
      if (k == 0) continue;
      if (!seen[k]) {
        seen[k] = true;
        best_hi[k] = s;
        best_lo[k] = s;
      } else {
        if (s > best_hi[k]) best_hi[k] = s;
        if (s < best_lo[k]) best_lo[k] = s;
      }
    }
    for (std::size_t k = 1; k <= total; ++k) {
      if (prof_U(p, (long long)k) != best_hi[k] ||
          prof_L(p, (long long)k) != best_lo[k]) {
        note = "subset-sum mismatch at rep " + std::to_string(rep);
        return false;
      }
      ++checked;
    }
  }
  note = std::to_string(checked) + " exhaustive k-checks";
  return checked > 300;
}

bool crit_tails(std::string& note) {
  Rng rng(505);
  for (int rep = 0; rep < 300; ++rep) {
    Profile p = rand_profile(rng, 4, 10, true);
    Rat em;
    bool first = true;
    for (const PEntry& e : p.entries)
      if (e.inf_mult && (first || e.value > em)) {
        em = e.value;
        first = false;
      }
    if (first) continue;
    if (prof_U_fn(p).tail_increment != em) {
      note = "tail increment off essential max at rep " + std::to_string(rep);
      return false;
    }
  }
  Rng prng(506);
  for (int rep = 0; rep < 3; ++rep) {
    auto [a, b] = rand_majorized_pair(prng);
    DiscretizationResult R = discretize_pair(a, b, 4, false);
    Rat base = prof_U(R.g, R.N);
    Rat em;
    bool first = true;
    for (const PEntry& e : R.g.entries)
      if (e.inf_mult && (first || e.value > em)) {
        em = e.value;
        first = false;
      }
    for (long long k : {R.N + 1, R.N + 13, 2 * R.N + 5}) {
      if (prof_U(R.g, k) != base + rat_ll(k - R.N) * em) {
        note = "discretized tail formula failed at rep " + std::to_string(rep);
        return false;
      }
    }
  }
  note = "300 profiles + discretized tails";
  return true;
}

bool crit_pl_grid(std::string& note) {
  Rng rng(606);
  int disagreed = 0, true_seen = 0, false_seen = 0;
  for (int rep = 0; rep < 300; ++rep) {
    PLFunction F, G;
    if (rep % 2 == 0) {
      auto [a, b] = rand_majorized_pair(rng);
      if (rep % 4 == 0) {
        F = u_fn(a);
        G = u_fn(b);
      } else {
        F = l_fn(b);
        G = l_fn(a);
      }
    } else {
      StepOperator a = rand_ambient(rng, false);
      StepOperator b = rand_ambient(rng, false);
      F = rep % 4 == 1 ? u_fn(a) : l_fn(a);
      G = rep % 4 == 1 ? u_fn(b) : l_fn(b);
    }
    bool exact = pl_dominates(F, G);
    (exact ? true_seen : false_seen)++;
    Rat span = std::max(F.last_t(), G.last_t()) + Rat(3);
    Rat h = span / Rat(1000);
    bool grid_viol = false;
    for (int i = 0; i <= 1000; ++i) {
      Rat t = rat_ll(i) * h;
      if (F.eval(t) > G.eval(t)) {
        grid_viol = true;
        break;
      }
    }
    if (exact && grid_viol) ++disagreed;
    if (!exact) {
      auto w = pl_dominates_witness(F, G);
      if (!w || !(F.eval(*w) > G.eval(*w))) ++disagreed;
    }
  }
  note = "300 pairs (" + std::to_string(true_seen) + " dominated, " +
         std::to_string(false_seen) + " not)";
  return disagreed == 0 && true_seen > 0 && false_seen > 0;
}

bool crit_pinch(std::string& note) {
  Rng rng(707);
  for (int rep = 0; rep < 500; ++rep) {
    std::size_t n = (std::size_t)rint_in(rng, 2, 7);
    Mat A = rand_symmetric(rng, n);
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = (int)i;
    for (std::size_t i = n; i > 1; --i)
      std::swap(idx[i - 1], idx[(std::size_t)rint_in(rng, 0, (long long)i - 1)]);
    std::vector<std::vector<int>> blocks(1);
    for (std::size_t i = 0; i < n; ++i) {
      if (!blocks.back().empty() && rint_in(rng, 0, 2) == 0)
        blocks.emplace_back();
      blocks.back().push_back(idx[i]);
    }
    Mat P = pinch(A, blocks);
    if (!vec_majorizes_f(jacobi_eig(P).eigvals, jacobi_eig(A).eigvals, 1e-8)) {
      note = "pinched spectrum escaped at rep " + std::to_string(rep);
      return false;
    }
  }
  note = "500 pinchings";
  return true;
}

bool crit_kadison(std::string& note) {
  Rng rng(808);
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t n = (std::size_t)rint_in(rng, 1, 8);
    long long k = rint_in(rng, 1, (long long)n);
    std::vector<Rat> y(n), alpha(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rand_rat_nonneg(rng, 3, 6);
    std::sort(y.rbegin(), y.rend());
    Rat asum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      alpha[i] = rand_rat_nonneg(rng, 1, 6);
      asum += alpha[i];
    }
    if (asum > rat_ll(k))
      for (Rat& a : alpha) a = a * rat_ll(k) / asum;
    KadisonOut out = kadison_check(alpha, y, k);
    if (!out.pre_ok || !out.holds) {
      note = "averaging inequality failed at rep " + std::to_string(rep);
      return false;
    }
  }
  Rng xrng(809);
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t n = (std::size_t)rint_in(xrng, 2, 6);
    long long k = rint_in(xrng, 1, (long long)n);
    std::vector<Rat> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = rand_rat_nonneg(xrng, 3, 6);
    std::sort(g.rbegin(), g.rend());
    Mat V = jacobi_eig(rand_symmetric(xrng, n)).V;
    std::vector<double> d(n);
    double dsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = runif(xrng);
      dsum += d[i];
    }
    if (dsum > (double)k)
      for (double& v : d) v *= (double)k / dsum;
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double xii = 0.0;
      for (std::size_t j = 0; j < n; ++j) xii += V[i][j] * V[i][j] * d[j];
      lhs += rat_dbl(g[i]) * xii;
    }
    double rhs = 0.0;
    for (long long i = 0; i < k; ++i) rhs += rat_dbl(g[(std::size_t)i]);
    if (lhs > rhs + 1e-9) {
      note = "trace bound failed at rep " + std::to_string(rep);
      return false;
    }
  }
  note = "1000 inequalities + 200 contraction traces";
  return true;
}

bool crit_contractive(std::string& note) {
  Rng rng(909);
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t p = (std::size_t)rint_in(rng, 1, 6);
    std::size_t q = (std::size_t)rint_in(rng, 1, 6);
    auto [f, g] = rand_vec_weak(rng, p, q);
    Rat eps = rep % 2 == 0 ? Rat(1, 4) : Rat(1, 16);
    ContractOut c = contractive_construct(f, g, eps);
    double smax = c.C.empty() || c.C[0].empty() ? 0.0 : sigma_max(c.C);
    if (smax > 1.0 + 1e-9) {
      note = "contraction norm exceeded at rep " + std::to_string(rep);
      return false;
    }
    double bound = 3.0 * rat_dbl(eps);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::fabs(c.realized[i] - rat_dbl(f[i])) >= bound) {
        note = "diagonal left the corridor at rep " + std::to_string(rep);
        return false;
      }
  }
  ContractOut hand = contractive_construct({Rat(1)}, {Rat(2)}, Rat(1, 2));
  if (hand.horn.rots.empty() || hand.horn.rots[0].t != Rat(3, 5)) {
    note = "hand case lost the exact rotation parameter";
    return false;
  }
  note = "200 pairs + exact hand case";
  return true;
}

bool crit_discretize(std::string& note) {
  double t0 = now_s();
  Rng rng(1010);
  for (int rep = 0; rep < 100; ++rep) {
    auto [a, b] = rand_majorized_pair(rng);
    for (long long m : {2LL, 4LL, 8LL, 16LL}) {
      DiscretizationResult R = discretize_pair(a, b, m, false);
      Rat inv_m = Rat(1) / rat_ll(m);
      Rat two_m = Rat(2) / rat_ll(m);
      if (!prof_majorizes(R.f, R.g)) {
        note = "profiles lost the order at rep " + std::to_string(rep);
        return false;
      }
      if (!(R.remainder_total < inv_m)) {
        note = "remainder too large at rep " + std::to_string(rep);
        return false;
      }
      bool certs_ok = R.cert_a.member && R.cert_b.member &&
                      R.cert_a.eps <= two_m && R.cert_a.delta <= two_m &&
                      R.cert_b.eps <= two_m && R.cert_b.delta <= two_m;
      if (!certs_ok) {
        note = "certificates out of budget at rep " + std::to_string(rep) +
               " m=" + std::to_string(m);
        return false;
      }
    }
  }
  double dt = now_s() - t0;
  note = "400 runs, " + std::to_string(dt).substr(0, 5) + "s";
  return dt < 60.0;
}

bool crit_endtoend(std::string& note) {
  StepOperator id = inf_op({{Rat(1), Weight::inf()}});
  StepOperator proj = inf_op({{Rat(1), Weight::inf()}, {Rat(0), Weight::inf()}});
  for (long long m : {2LL, 4LL, 8LL}) {
    RunReport R = sh_approximate(id, proj, m, 64);
    if (!R.pass || R.eps_final > Rat(3) / rat_ll(m) ||
        R.delta_final > Rat(4) / rat_ll(m)) {
      note = "window failed at m=" + std::to_string(m);
      return false;
    }
    DsOut d = doubly_stochastic_report(R.U, R.x, R.y);
    if (d.row_err > 1e-9 || d.col_err > 1e-9 || d.transport_err > 1e-8) {
      note = "transport report failed at m=" + std::to_string(m);
      return false;
    }
  }
  note = "m in {2,4,8}, T=64";
  return true;
}

bool crit_hinge(std::string& note) {
  Rng rng(1212);
  int true_seen = 0, false_seen = 0;
  for (int rep = 0; rep < 300; ++rep) {
    StepOperator b = rand_compact_pos(rng);
    StepOperator a = rep % 2 == 0 ? flag_average(b) : rand_compact_pos(rng);
    bool sub = submajorizes(a, b);
    std::vector<Rat> cs{Rat(0)};
    for (const Atom& at : a.atoms) cs.push_back(at.value);
    for (const Atom& at : b.atoms) cs.push_back(at.value);
    bool hinge_all = true;
    for (const Rat& c : cs) {
      Weight ha = hinge_trace(a, c, Hinge::Upper);
      Weight hb = hinge_trace(b, c, Hinge::Upper);
      if (ha.is_inf() || hb.is_inf() || ha.fin() > hb.fin()) {
        hinge_all = false;
        break;
      }
    }
    if (sub != hinge_all) {
      note = "equivalence broke at rep " + std::to_string(rep);
      return false;
    }
    (sub ? true_seen : false_seen)++;
  }
  note = "300 pairs (" + std::to_string(true_seen) + " ordered, " +
         std::to_string(false_seen) + " not)";
  return true_seen > 0 && false_seen > 0;
}

bool crit_identities(std::string& note) {
  Rng rng(1313);
  const std::vector<Rat> ts{Rat(0), Rat(1, 3), Rat(1), Rat(7, 2), Rat(10)};
  for (int rep = 0; rep < 200; ++rep) {
    StepOperator x = rand_ambient(rng, false);
    auto parts = compact_parts(x);
    auto eb = ess_bounds(x);
    PLFunction ux = u_fn(x), lx = l_fn(x);
    PLFunction ubar = u_fn(parts.first), ulow = u_fn(parts.second);
    PLFunction uneg = u_fn(negate_op(x));
    for (const Rat& t : ts) {
      if (ux.eval(t) != ubar.eval(t) + t * eb.second) {
        note = "upper reduction identity failed at rep " + std::to_string(rep);
        return false;
      }
      if (lx.eval(t) != -ulow.eval(t) + t * eb.first) {
        note = "lower reduction identity failed at rep " + std::to_string(rep);
        return false;
      }
      if (lx.eval(t) != -uneg.eval(t)) {
        note = "duality failed at rep " + std::to_string(rep);
        return false;
      }
    }
    StepOperator y = rep % 2 == 0 ? flag_average(x) : rand_ambient(rng, false);
    bool aligned = true;
    StepOperator d = x;
    try {
      d = op_of_flag(flag_sub(flag_of(x), flag_of(y)));
    } catch (const Error&) {
      aligned = false;
    }
    if (aligned) {
      PLFunction uy = u_fn(y);
      for (const Rat& t : ts) {
        Rat gap = ux.eval(t) - uy.eval(t);
        if (gap < 0) gap = -gap;
        if (gap > ks_norm(d, t)) {
          note = "lipschitz bound failed at rep " + std::to_string(rep);
          return false;
        }
      }
    }
    std::vector<Atom> fatoms;
    long long na = rint_in(rng, 1, 4);
    for (long long i = 0; i < na; ++i)
      fatoms.push_back(
          Atom{rand_rat(rng, 3, 6) + Rat(1) / rat_ll(50 + i), Weight(rand_rat_nonneg(rng, 2, 4) + Rat(1, 7))});
    StepOperator z = make_operator(fatoms, Ambient::Fin);
    Rat W = total_weight(z).fin();
    if (ks_norm(z, W) != trace_norm(z).fin()) {
      note = "finite-trace proxy failed at rep " + std::to_string(rep);
      return false;
    }
  }
  note = "200 operators, exact";
  return true;
}

struct Criterion {
  const char* name;
  bool (*fn)(std::string&);
};

}  // namespace

int main() {
  const Criterion table[] = {
      {"diagonal majorized by spectrum on random symmetric matrices", crit_schur},
      {"orthogonal realization of majorized diagonals", crit_horn},
      {"exact decomposition of doubly stochastic matrices", crit_birkhoff},
      {"profile partial sums against exhaustive subset sums", crit_prof_subset},
      {"closed-form ambient tails of partial-sum curves", crit_tails},
      {"exact curve dominance versus dense-grid falsifier", crit_pl_grid},
      {"pinched spectra majorized by originals", crit_pinch},
      {"averaging inequality and contraction trace bounds", crit_kadison},
      {"contractive carriage within three epsilon", crit_contractive},
      {"discretization keeps order, remainders, and certificates", crit_discretize},
      {"end-to-end window runs inside the claimed budget", crit_endtoend},
      {"weak order equivalent to hinge trace inequalities", crit_hinge},
      {"exact spectral scale identities", crit_identities},
  };
  double t0 = now_s();
  int failures = 0;
  int idx = 0;
  for (const Criterion& c : table) {
    ++idx;
    std::string note;
    bool ok = false;
    try {
      ok = c.fn(note);
    } catch (const Error& e) {
      note = std::string("error: ") + e.what();
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    std::printf("%s %2d. %s (%s)\n", ok ? "PASS" : "FAIL", idx, c.name,
                note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  std::printf("%d/13 criteria passed in %.1fs\n", 13 - failures, now_s() - t0);
  return failures;
}
