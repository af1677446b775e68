#include "opmaj/cli.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "opmaj/gen.hpp"
#include "opmaj/io.hpp"
#include "opmaj/pipeline.hpp"

namespace opmaj {

namespace {

std::string dstr(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.12g", v);
  return b;
}

// Command-line rationals; parse trouble is a usage error, not a math error.
Rat arg_rat(const std::string& s) {
  try {
    return rat_parse(s);
  } catch (const Error& e) {
    fail(Kind::IoError, std::string("argument: ") + e.what());
  }
}

void print_scale(std::ostream& out, const char* name, const StepScale& sc) {
  out << name << ":";
  Rat acc = 0;
  for (const ScalePiece& p : sc.pieces) {
    if (p.duration.is_inf()) {
      out << " " << rat_str(p.value) << " on [" << rat_str(acc) << ", inf)";
    } else {
      Rat next = acc + p.duration.fin();
      out << " " << rat_str(p.value) << " on [" << rat_str(acc) << ", "
          << rat_str(next) << ")";
      acc = next;
    }
  }
  out << "\n";
}

void print_chain(std::ostream& out, const std::vector<ChainLine>& chain,
                 const Rat& eps_final, const Rat& delta_final) {
  out << "chain:\n";
  for (const ChainLine& c : chain)
    out << "  " << c.label << " eps=" << rat_str(c.eps)
        << " delta=" << rat_str(c.delta) << "\n";
  out << "final: eps=" << rat_str(eps_final) << " delta=" << rat_str(delta_final)
      << "\n";
}

void write_curves_file(const std::string& path, const StepOperator& a,
                       const StepOperator& b) {
  std::ofstream f(path);
  if (!f) fail(Kind::IoError, path + ": cannot open for writing");
  emit_curves(f, a, b);
  if (!f) fail(Kind::IoError, path + ": write failure");
}

std::vector<std::vector<int>> parse_blocks(const std::string& spec,
                                           std::size_t n) {
  std::vector<std::vector<int>> blocks;
  std::stringstream groups(spec);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<int> blk;
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) {
      try {
        std::size_t idx = 0;
        int v = std::stoi(item, &idx);
        if (idx != item.size()) throw std::invalid_argument(item);
        blk.push_back(v);
      } catch (const std::exception&) {
        fail(Kind::IoError, "argument: bad block index: " + item);
      }
    }
    if (!blk.empty()) blocks.push_back(blk);
  }
  if (blocks.empty()) fail(Kind::IoError, "argument: empty block spec");
  (void)n;
  return blocks;
}

Mat rat_mat_dbl(const RatMat& M) {
  Mat A(M.size());
  for (std::size_t i = 0; i < M.size(); ++i) {
    A[i].reserve(M[i].size());
    for (const Rat& v : M[i]) A[i].push_back(rat_dbl(v));
  }
  return A;
}

template <typename WriteFn>
void write_out(const std::string& path, std::ostream& fallback, WriteFn fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) fail(Kind::IoError, path + ": cannot open for writing");
  fn(f);
  if (!f) fail(Kind::IoError, path + ": write failure");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"spectral scales, majorization order, and finite realization "
               "for step operators"};
  app.name("opmaj");
  app.require_subcommand(1);
  int code = 0;

  struct {
    std::string a, b, csv;
    std::string tpoint, cpoint, side = "upper";
    std::string eps = "1/4";
    long long m = 2, T = 64;
    std::string mode = "exact";
    std::string blocks;
    bool weak = false;
    unsigned long long seed = 1;
    std::string kind = "pair";
    long long size = 6;
    std::string out_a, out_b;
  } o;

  auto* scales = app.add_subcommand("scales", "print the spectral scales of one operator");
  scales->add_option("op", o.a, "operator file")->required();
  scales->callback([&] {
    StepOperator x = read_operator(o.a);
    out << "operator: " << op_str(x) << "\n";
    out << "sup norm: " << rat_str(sup_norm(x)) << "\n";
    out << "trace: " << xstr(trace(x)) << "\n";
    out << "trace norm: " << wstr(trace_norm(x)) << "\n";
    if (x.ambient == Ambient::Inf) {
      auto eb = ess_bounds(x);
      out << "essential bounds: [" << rat_str(eb.first) << ", "
          << rat_str(eb.second) << "]\n";
    }
    print_scale(out, "upper", upper_scale(x));
    print_scale(out, "lower", lower_scale(x));
    print_scale(out, "singular", singular_scale(x));
    code = 0;
  });

  auto add_check = [&](const char* name, const char* desc, bool weak_rel) {
    auto* c = app.add_subcommand(name, desc);
    c->add_option("a", o.a, "left operator file")->required();
    c->add_option("b", o.b, "right operator file")->required();
    c->add_option("--csv-out", o.csv, "write both scale-integral curves as CSV");
    c->callback([&, weak_rel] {
      StepOperator a = read_operator(o.a);
      StepOperator b = read_operator(o.b);
      bool verdict = weak_rel ? submajorizes(a, b) : majorizes(a, b);
      if (!o.csv.empty()) write_curves_file(o.csv, a, b);
      out << (weak_rel ? "submajorized: " : "majorized: ")
          << (verdict ? "yes" : "no") << "\n";
      if (!verdict && a.ambient == Ambient::Inf && b.ambient == Ambient::Inf) {
        if (auto w = pl_dominates_witness(u_fn(a), u_fn(b)))
          out << "upper integral exceeds at t = " << rat_str(*w) << "\n";
        else if (auto wl = pl_dominates_witness(l_fn(b), l_fn(a)))
          out << "lower integral falls short at t = " << rat_str(*wl) << "\n";
      }
      code = verdict ? 0 : 1;
    });
  };
  add_check("check", "decide whether a is majorized by b", false);
  add_check("check-weak", "decide whether a is weakly majorized by b", true);

  auto* kfan = app.add_subcommand("kfan", "evaluate the scale integrals at one point");
  kfan->add_option("op", o.a, "operator file")->required();
  kfan->add_option("t", o.tpoint, "evaluation point, rational >= 0")->required();
  kfan->callback([&] {
    StepOperator x = read_operator(o.a);
    Rat t = arg_rat(o.tpoint);
    out << "U(" << rat_str(t) << ") = " << rat_str(u_fn(x).eval(t)) << "\n";
    out << "L(" << rat_str(t) << ") = " << rat_str(l_fn(x).eval(t)) << "\n";
    out << "ks(" << rat_str(t) << ") = " << rat_str(ks_norm(x, t)) << "\n";
    code = 0;
  });

  auto* horn = app.add_subcommand("horn", "realize a majorized diagonal by rotations");
  horn->add_option("x", o.a, "target vector file")->required();
  horn->add_option("y", o.b, "spectrum vector file")->required();
  horn->callback([&] {
    std::vector<Rat> x = read_vector(o.a);
    std::vector<Rat> y = read_vector(o.b);
    HornOut h = horn_construct(x, y);
    std::vector<double> yd(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yd[i] = rat_dbl(y[i]);
    Mat A = sym_conj(h.U, yd);
    double derr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      derr = std::max(derr, std::fabs(A[i][i] - rat_dbl(x[i])));
    out << "rotations: " << h.rots.size() << "\n";
    out << "U:\n";
    for (const auto& row : h.U) {
      for (std::size_t j = 0; j < row.size(); ++j)
        out << (j ? " " : "") << dstr(row[j]);
      out << "\n";
    }
    out << "diag error: " << dstr(derr) << "\n";
    code = derr < 1e-8 ? 0 : 1;
  });

  auto* ttr = app.add_subcommand("ttransform", "exact doubly stochastic transport");
  ttr->add_option("x", o.a, "target vector file")->required();
  ttr->add_option("y", o.b, "source vector file")->required();
  ttr->callback([&] {
    RatMat D = ttransform_chain(read_vector(o.a), read_vector(o.b));
    write_matrix(out, D);
    code = 0;
  });

  auto* birk = app.add_subcommand("birkhoff", "decompose a doubly stochastic matrix");
  birk->add_option("D", o.a, "matrix file")->required();
  birk->add_option("--mode", o.mode, "exact or float")
      ->check(CLI::IsMember({"exact", "float"}));
  birk->callback([&] {
    RatMat D = read_matrix(o.a);
    if (o.mode == "exact") {
      auto terms = birkhoff_decompose(D);
      out << "terms: " << terms.size() << "\n";
      for (const auto& t : terms) {
        out << rat_str(t.coeff) << " :";
        for (int p : t.perm) out << " " << p;
        out << "\n";
      }
    } else {
      auto terms = birkhoff_decompose_f(rat_mat_dbl(D));
      out << "terms: " << terms.size() << "\n";
      for (const auto& t : terms) {
        out << dstr(t.coeff) << " :";
        for (int p : t.perm) out << " " << p;
        out << "\n";
      }
    }
    code = 0;
  });

  auto* pin = app.add_subcommand("pinch", "pinch a symmetric matrix and compare spectra");
  pin->add_option("A", o.a, "matrix file")->required();
  pin->add_option("--blocks", o.blocks, "semicolon-separated index groups, e.g. 0,1;2")
      ->required();
  pin->callback([&] {
    Mat A = rat_mat_dbl(read_matrix(o.a));
    auto blocks = parse_blocks(o.blocks, A.size());
    Mat P = pinch(A, blocks);
    EigOut ea = jacobi_eig(A);
    EigOut ep = jacobi_eig(P);
    out << "spectrum: ";
    for (std::size_t i = 0; i < ea.eigvals.size(); ++i)
      out << (i ? " " : "") << dstr(ea.eigvals[i]);
    out << "\npinched spectrum: ";
    for (std::size_t i = 0; i < ep.eigvals.size(); ++i)
      out << (i ? " " : "") << dstr(ep.eigvals[i]);
    bool verdict = vec_majorizes_f(ep.eigvals, ea.eigvals, 1e-8);
    out << "\npinched majorized: " << (verdict ? "yes" : "no") << "\n";
    code = verdict ? 0 : 1;
  });

  auto* con = app.add_subcommand("contract", "carry one nonnegative vector near another");
  con->add_option("f", o.a, "target vector file")->required();
  con->add_option("g", o.b, "source vector file")->required();
  con->add_option("--eps", o.eps, "corridor width, positive rational");
  con->callback([&] {
    std::vector<Rat> f = read_vector(o.a);
    std::vector<Rat> g = read_vector(o.b);
    Rat eps = arg_rat(o.eps);
    ContractOut c = contractive_construct(f, g, eps);
    double smax = c.C.empty() || c.C[0].empty() ? 0.0 : sigma_max(c.C);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      double lo = rat_dbl(f[i]), hi = rat_dbl(f[i] + eps);
      worst = std::max(worst, std::max(lo - c.realized[i], c.realized[i] - hi));
    }
    out << "C: " << c.C.size() << " x " << (c.C.empty() ? 0 : c.C[0].size())
        << "\n";
    out << "sigma_max: " << dstr(smax) << "\n";
    out << "realized:";
    for (double r : c.realized) out << " " << dstr(r);
    out << "\ncorridor excess: " << dstr(worst) << "\n";
    bool ok = smax <= 1.0 + 1e-9 && worst <= 1e-9;
    out << "within corridor: " << (ok ? "yes" : "no") << "\n";
    code = ok ? 0 : 1;
  });

  auto* disc = app.add_subcommand("discretize", "discretize a majorized pair with certificates");
  disc->add_option("a", o.a, "left operator file")->required();
  disc->add_option("b", o.b, "right operator file")->required();
  disc->add_option("-m,--resolution", o.m, "resolution parameter, integer >= 1");
  disc->add_flag("--weak", o.weak, "weak mode: positive pair, upper flags only");
  disc->callback([&] {
    DiscretizationResult R =
        discretize_pair(read_operator(o.a), read_operator(o.b), o.m, o.weak);
    out << "t = " << rat_str(R.t) << ", N = " << R.N
        << ", cells = " << R.part.cells.size() << "\n";
    out << "remainders: a = " << rat_str(R.remainder_a)
        << ", b = " << rat_str(R.remainder_b)
        << ", balanced = " << rat_str(R.remainder_total) << "\n";
    for (const SlackLine& sl : R.slack_ledger)
      out << "slack: " << sl.label << " eps=" << rat_str(sl.eps)
          << " delta=" << rat_str(sl.delta) << "\n";
    out << "cert-a member: " << (R.cert_a.member ? "yes" : "no")
        << ", cert-b member: " << (R.cert_b.member ? "yes" : "no") << "\n";
    out << "# profile of a\n";
    write_profile(out, R.f);
    out << "# profile of b\n";
    write_profile(out, R.g);
    code = 0;
  });

  auto* run = app.add_subcommand("run", "full pipeline: discretize, window, rotate");
  run->add_option("a", o.a, "left operator file")->required();
  run->add_option("b", o.b, "right operator file")->required();
  run->add_option("-m,--resolution", o.m, "resolution parameter, integer >= 1");
  run->add_option("-T,--window", o.T, "window size");
  run->callback([&] {
    RunReport R = sh_approximate(read_operator(o.a), read_operator(o.b), o.m, o.T);
    out << "t = " << rat_str(R.t) << ", N = " << R.N << ", T = " << R.T << "\n";
    print_chain(out, R.chain, R.eps_final, R.delta_final);
    out << "diag error: " << dstr(R.diag_err) << "\n";
    out << "orth defect: " << dstr(R.orth_defect) << "\n";
    out << "window pass: " << (R.pass ? "yes" : "no") << "\n";
    code = R.pass ? 0 : 1;
  });

  auto* runc = app.add_subcommand("run-contractive", "weak pipeline with dilation and compression");
  runc->add_option("a", o.a, "left operator file")->required();
  runc->add_option("b", o.b, "right operator file")->required();
  runc->add_option("-m,--resolution", o.m, "resolution parameter, integer >= 1");
  runc->add_option("--eps", o.eps, "dilation width, positive rational");
  runc->add_option("-T,--window", o.T, "window size");
  runc->callback([&] {
    ContractiveReport R = contractive_approximate(
        read_operator(o.a), read_operator(o.b), o.m, arg_rat(o.eps), o.T);
    out << "t = " << rat_str(R.t) << ", N = " << R.N << ", T = " << R.T
        << ", kept = " << R.g_kept.size() << "\n";
    print_chain(out, R.chain, R.eps_final, R.delta_final);
    out << "diag error: " << dstr(R.diag_err) << "\n";
    out << "sigma_max: " << dstr(R.sigma) << "\n";
    out << "window pass: " << (R.pass ? "yes" : "no") << "\n";
    code = R.pass ? 0 : 1;
  });

  auto* l1 = app.add_subcommand("l1-check", "majorization with exact trace equality");
  l1->add_option("a", o.a, "left operator file")->required();
  l1->add_option("b", o.b, "right operator file")->required();
  l1->callback([&] {
    StepOperator a = read_operator(o.a);
    StepOperator b = read_operator(o.b);
    bool verdict = l1_check(a, b);
    out << "trace a: " << xstr(trace(a)) << ", trace b: " << xstr(trace(b))
        << "\n";
    out << "l1 order: " << (verdict ? "yes" : "no") << "\n";
    code = verdict ? 0 : 1;
  });

  auto* hin = app.add_subcommand("hinge", "hinge integral against the spectral weights");
  hin->add_option("op", o.a, "operator file")->required();
  hin->add_option("c", o.cpoint, "hinge point, rational")->required();
  hin->add_option("side", o.side, "upper or lower")
      ->check(CLI::IsMember({"upper", "lower"}));
  hin->callback([&] {
    StepOperator x = read_operator(o.a);
    Rat c = arg_rat(o.cpoint);
    Weight w = hinge_trace(x, c, o.side == "upper" ? Hinge::Upper : Hinge::Lower);
    out << "hinge(" << o.side << ", " << rat_str(c) << ") = " << wstr(w) << "\n";
    code = 0;
  });

  auto* ds = app.add_subcommand("ds", "doubly stochastic report for a pipeline window");
  ds->add_option("a", o.a, "left operator file")->required();
  ds->add_option("b", o.b, "right operator file")->required();
  ds->add_option("-m,--resolution", o.m, "resolution parameter, integer >= 1");
  ds->add_option("-T,--window", o.T, "window size");
  ds->callback([&] {
    RunReport R = sh_approximate(read_operator(o.a), read_operator(o.b), o.m, o.T);
    DsOut d = doubly_stochastic_report(R.U, R.x, R.y);
    out << "row error: " << dstr(d.row_err) << "\n";
    out << "col error: " << dstr(d.col_err) << "\n";
    out << "transport error: " << dstr(d.transport_err) << "\n";
    out << "doubly stochastic: " << (d.ok ? "yes" : "no") << "\n";
    code = d.ok ? 0 : 1;
  });

  auto* gen = app.add_subcommand("gen", "emit seeded random objects");
  gen->group("");
  gen->add_option("--seed", o.seed, "engine seed")->required();
  gen->add_option("--kind", o.kind, "pair, weak-pair, vec-pair, ds, or sym")
      ->check(CLI::IsMember({"pair", "weak-pair", "vec-pair", "ds", "sym"}));
  gen->add_option("-n,--size", o.size, "object size where it applies");
  gen->add_option("--out-a", o.out_a, "first output file (default stdout)");
  gen->add_option("--out-b", o.out_b, "second output file (default stdout)");
  gen->callback([&] {
    Rng rng(o.seed);
    std::size_t n = (std::size_t)std::max<long long>(1, o.size);
    if (o.kind == "pair" || o.kind == "weak-pair") {
      auto pr = o.kind == "pair" ? rand_majorized_pair(rng) : rand_weak_pair(rng);
      write_out(o.out_a, out, [&](std::ostream& os) { write_operator(os, pr.first); });
      write_out(o.out_b, out, [&](std::ostream& os) { write_operator(os, pr.second); });
    } else if (o.kind == "vec-pair") {
      auto pr = rand_vec_majorized(rng, n);
      write_out(o.out_a, out, [&](std::ostream& os) { write_vector(os, pr.first); });
      write_out(o.out_b, out, [&](std::ostream& os) { write_vector(os, pr.second); });
    } else if (o.kind == "ds") {
      write_out(o.out_a, out, [&](std::ostream& os) {
        write_matrix(os, rand_doubly_stochastic(rng, n, 5));
      });
    } else {
      Mat A = rand_symmetric(rng, n);
      RatMat M(A.size());
      for (std::size_t i = 0; i < A.size(); ++i)
        for (double v : A[i]) M[i].push_back(rat_of_double(v));
      write_out(o.out_a, out, [&](std::ostream& os) { write_matrix(os, M); });
    }
    code = 0;
  });

  std::vector<const char*> argv;
  argv.push_back("opmaj");
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind == Kind::IoError ? 2 : 3;
  }
  return code;
}

}  // namespace opmaj
