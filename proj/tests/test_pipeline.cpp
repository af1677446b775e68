#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "opmaj/gen.hpp"
#include "opmaj/pipeline.hpp"
#include "test_util.hpp"

using namespace opmaj;
using opmaj_test::err_kind;

namespace {

StepOperator inf_op(std::vector<Atom> atoms) {
  return make_operator(std::move(atoms), Ambient::Inf);
}

const StepOperator kId = inf_op({{Rat(1), Weight::inf()}});
const StepOperator kProj = inf_op({{Rat(1), Weight::inf()}, {Rat(0), Weight::inf()}});
const StepOperator kBump = inf_op({{Rat(2), Weight(1)}, {Rat(1), Weight::inf()}});

Profile prof(std::vector<PEntry> es) { return make_profile(std::move(es), true); }

}  // namespace

TEST_CASE("window extraction swaps tail mass until the sums meet") {
  Profile f = prof({{Rat(1), true, 0}});
  Profile g = prof({{Rat(2), false, 66}, {Rat(1), true, 0}});
  WindowOut w = truncate_to(f, g, 64);
  CHECK(w.T == 64);
  CHECK(w.defects == 0);
  CHECK(w.x == std::vector<Rat>(64, Rat(1)));
  CHECK(w.y == std::vector<Rat>(64, Rat(1)));

  WindowOut small = truncate_to(f, g, 4);
  CHECK(small.x == std::vector<Rat>(4, Rat(1)));
  CHECK(small.y == std::vector<Rat>(4, Rat(1)));
  CHECK(vec_majorizes(small.x, small.y));
}

TEST_CASE("window extraction closes an unreachable gap with one defect") {
  Profile f = prof({{Rat(2), false, 1}, {Rat(1), true, 0}});
  Profile g = prof({{Rat(3), false, 1}, {Rat(1), true, 0}});
  WindowOut w = truncate_to(f, g, 2);
  CHECK(w.defects == 1);
  CHECK(w.x == std::vector<Rat>{Rat(2), Rat(1)});
  // the kept prefix absorbs the overshoot before replacements are appended
  CHECK(w.y == std::vector<Rat>{Rat(2), Rat(1)});
  CHECK(vec_majorizes(w.x, w.y));
}

TEST_CASE("window extraction rejects bad sizes, tags, and orders") {
  Profile f = prof({{Rat(1), true, 0}});
  Profile g = prof({{Rat(2), false, 1}, {Rat(1), true, 0}});
  CHECK(err_kind([&] { truncate_to(f, g, 0); }) == Kind::InvalidInput);
  CHECK(err_kind([&] { truncate_to(f, g, 3000000); }) == Kind::OutOfRange);
  CHECK(err_kind([&] { truncate_to(g, f, 4); }) == Kind::NotMajorized);
  Profile fin = make_profile({{Rat(1), false, 3}}, false);
  CHECK(err_kind([&] { truncate_to(fin, fin, 2); }) == Kind::AmbientMismatch);
}

TEST_CASE("full run on the flat operator under a projection") {
  RunReport R = sh_approximate(kId, kProj, 4, 64);
  CHECK(R.m == 4);
  CHECK(R.T == 64);
  CHECK(R.t == Rat(1));
  CHECK(R.N == 132);
  CHECK(R.x == std::vector<Rat>(64, Rat(1)));
  CHECK(R.y == std::vector<Rat>(64, Rat(1)));
  CHECK(R.diag_err == 0.0);
  CHECK(R.orth_defect == 0.0);
  CHECK(R.eps_final == Rat(1, 2));
  CHECK(R.delta_final == Rat(1, 2));
  CHECK(R.pass);

  REQUIRE(R.chain.size() == 5);
  CHECK(R.chain[0].label == "cert-a");
  CHECK(R.chain[1].label == "cert-b");
  CHECK(R.chain[2].label == "alignment-corner");
  CHECK(R.chain[3].label == "truncation");
  CHECK(R.chain[4].label == "matrix");
  CHECK(R.chain[0].eps == Rat(1, 4));
  CHECK(R.chain[0].delta == Rat(1, 4));
  CHECK(R.chain[2].delta == Rat(0));

  auto claim = R.recompute_claim();
  CHECK(claim.first == R.eps_final);
  CHECK(claim.second == R.delta_final);
}

TEST_CASE("full run on a compact bump keeps the window exact") {
  RunReport R = sh_approximate(kId, kBump, 2, 64);
  CHECK(R.N == 66);
  CHECK(R.y == std::vector<Rat>(64, Rat(1)));
  CHECK(R.eps_final == Rat(1));
  CHECK(R.delta_final == Rat(1));
  CHECK(R.pass);
}

TEST_CASE("full runs on random pairs pass their own claim") {
  Rng rng(808);
  for (int rep = 0; rep < 4; ++rep) {
    auto [a, b] = rand_majorized_pair(rng);
    RunReport R = sh_approximate(a, b, 4, 32);
    CHECK(R.pass);
    CHECK(R.orth_defect < 1e-9);
    CHECK(R.diag_err < 0.25 + 1e-8);
    CHECK(vec_majorizes(R.x, R.y));
    REQUIRE(R.chain.size() >= 3);
    CHECK(R.chain[R.chain.size() - 1].label == "matrix");
    CHECK(R.chain[R.chain.size() - 2].label == "truncation");
    CHECK(R.chain[R.chain.size() - 3].label == "alignment-corner");
    auto claim = R.recompute_claim();
    CHECK(claim.first == R.eps_final);
    CHECK(claim.second == R.delta_final);
  }
}

TEST_CASE("contractive run compresses the dilated window") {
  ContractiveReport R = contractive_approximate(kId, kBump, 2, Rat(1, 4), 64);
  CHECK(R.t == Rat(1));
  CHECK(R.N == 66);
  CHECK(R.T == 64);
  CHECK(R.f_target == std::vector<Rat>(64, Rat(1)));
  // 35 full slots survive plus the one defect-adjusted slot
  REQUIRE(R.g_kept.size() == 36);
  for (std::size_t j = 0; j < 35; ++j) CHECK(R.g_kept[j] == Rat(2));
  CHECK(R.g_kept.back() == Rat(1));
  REQUIRE(R.C.size() == 64);
  REQUIRE(R.C[0].size() == 36);
  CHECK(R.sigma <= 1.0 + 1e-9);
  CHECK(R.diag_err < 0.75);
  CHECK(R.pass);

  // one window defect surfaces as a single slot of mass slack
  bool saw_trunc = false;
  for (const ChainLine& c : R.chain)
    if (c.label == "truncation") {
      saw_trunc = true;
      CHECK(c.delta == Rat(1, 66));
    }
  CHECK(saw_trunc);
  CHECK(R.chain.back().label == "matrix-compression");
  CHECK(R.delta_final == Rat(67, 66));
  CHECK(R.eps_final >= Rat(5, 4));

  auto claim = R.recompute_claim();
  CHECK(claim.first == R.eps_final);
  CHECK(claim.second == R.delta_final);

  CHECK(err_kind([] {
          contractive_approximate(kId, kBump, 2, Rat(0), 8);
        }) == Kind::InvalidInput);
}

TEST_CASE("contractive runs on random weak pairs stay inside the corridor") {
  Rng rng(1913);
  for (int rep = 0; rep < 3; ++rep) {
    auto [a, b] = rand_weak_pair(rng);
    ContractiveReport R = contractive_approximate(a, b, 4, Rat(1, 4), 32);
    CHECK(R.sigma <= 1.0 + 1e-9);
    CHECK(R.diag_err < 3.0 * 0.25);
    CHECK(R.pass);
  }
}

TEST_CASE("signed split keeps ambient mass and traces") {
  StepOperator x =
      inf_op({{Rat(2), Weight(1)}, {Rat(-3), Weight(2)}, {Rat(0), Weight::inf()}});
  auto [pos, neg] = split_signed(x);
  REQUIRE(pos.atoms.size() == 2);
  CHECK(pos.atoms[0].value == Rat(2));
  CHECK(pos.atoms[0].weight.fin() == Rat(1));
  CHECK(pos.atoms[1].value == Rat(0));
  CHECK(pos.atoms[1].weight.is_inf());
  REQUIRE(neg.atoms.size() == 2);
  CHECK(neg.atoms[0].value == Rat(3));
  CHECK(neg.atoms[0].weight.fin() == Rat(2));
  CHECK(neg.atoms[1].weight.is_inf());
  CHECK(trace(pos).v - trace(neg).v == Rat(-4));

  // already positive: the negative part is pure rest mass at zero
  auto [p2, n2] = split_signed(kBump);
  CHECK(p2.atoms.size() == kBump.atoms.size());
  REQUIRE(n2.atoms.size() == 1);
  CHECK(n2.atoms[0].value == Rat(0));

  StepOperator finx = make_operator({{Rat(1), Weight(2)}, {Rat(-1), Weight(1)}}, Ambient::Fin);
  auto [p3, n3] = split_signed(finx);
  CHECK(p3.ambient == Ambient::Fin);
  CHECK(n3.ambient == Ambient::Fin);
}

TEST_CASE("trace order check needs both the order and the trace to agree") {
  CHECK(l1_check(kId, kProj));  // infinite traces on both sides agree
  StepOperator a = inf_op({{Rat(1), Weight(2)}, {Rat(0), Weight::inf()}});
  StepOperator b = inf_op({{Rat(2), Weight(1)}, {Rat(0), Weight::inf()}});
  CHECK(l1_check(a, b));
  StepOperator heavier = inf_op({{Rat(3), Weight(1)}, {Rat(0), Weight::inf()}});
  CHECK_FALSE(l1_check(a, heavier));  // traces 2 and 3 differ
  CHECK_FALSE(l1_check(b, a));        // order reversed
  StepOperator swing = inf_op({{Rat(1), Weight::inf()}, {Rat(-1), Weight::inf()}});
  CHECK(err_kind([&] { l1_check(swing, swing); }) == Kind::IndeterminateTrace);
}

TEST_CASE("weak and strong orders coincide against trace-class positives") {
  StepOperator small = inf_op({{Rat(1), Weight(1)}, {Rat(0), Weight::inf()}});
  StepOperator big = inf_op({{Rat(2), Weight(1)}, {Rat(0), Weight::inf()}});
  CHECK(l1_weak_equiv(small, big));
  CHECK_FALSE(l1_weak_equiv(big, small));
  CHECK(err_kind([&] {
          l1_weak_equiv(make_operator({{Rat(1), Weight(1)}}, Ambient::Fin), big);
        }) == Kind::AmbientMismatch);
  CHECK(err_kind([&] {
          l1_weak_equiv(inf_op({{Rat(-1), Weight(1)}, {Rat(0), Weight::inf()}}), big);
        }) == Kind::RequiresPositive);
  CHECK(err_kind([&] { l1_weak_equiv(small, kId); }) == Kind::InvalidInput);
}

TEST_CASE("hinge traces integrate the overshoot past the threshold") {
  StepOperator steps =
      inf_op({{Rat(3), Weight(2)}, {Rat(1), Weight::inf()}, {Rat(0), Weight(5)}});
  CHECK(hinge_trace(steps, Rat(2), Hinge::Upper).fin() == Rat(2));
  CHECK(hinge_trace(steps, Rat(1, 2), Hinge::Upper).is_inf());
  CHECK(hinge_trace(steps, Rat(2), Hinge::Lower).is_inf());
  CHECK(hinge_trace(steps, Rat(1, 2), Hinge::Lower).fin() == Rat(5, 2));
  CHECK(hinge_trace(steps, Rat(5), Hinge::Upper).is_zero());
}

TEST_CASE("squared realizer entries form a transport plan") {
  std::vector<Rat> x{Rat(1), Rat(1)};
  std::vector<Rat> y{Rat(2), Rat(0)};
  HornOut h = horn_construct(x, y);
  DsOut d = doubly_stochastic_report(h.U, x, y);
  CHECK(d.ok);
  CHECK(d.row_err <= 1e-9);
  CHECK(d.col_err <= 1e-9);
  CHECK(d.transport_err <= 1e-8);
  CHECK(d.D[0][0] == doctest::Approx(0.5));

  CHECK(err_kind([&] { doubly_stochastic_report(h.U, x, {Rat(1)}); }) == Kind::InvalidInput);
  Mat ragged{{1.0, 0.0}, {0.0}};
  CHECK(err_kind([&] { doubly_stochastic_report(ragged, x, y); }) == Kind::InvalidInput);
}
