#include "opmaj/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace opmaj {

namespace {

[[noreturn]] void io_fail(const std::string& path, long line,
                          const std::string& msg) {
  if (line > 0)
    fail(Kind::IoError, path + ":" + std::to_string(line) + ": " + msg);
  fail(Kind::IoError, path + ": " + msg);
}

struct Line {
  long no;
  std::vector<std::string> toks;
};

// Content lines only: comments stripped, blanks skipped.
std::vector<Line> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) io_fail(path, 0, "cannot open");
  std::vector<Line> out;
  std::string raw;
  long no = 0;
  while (std::getline(in, raw)) {
    ++no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::istringstream ss(raw.substr(0, raw.find('#')));
    Line l{no, {}};
    std::string tok;
    while (ss >> tok) l.toks.push_back(tok);
    if (!l.toks.empty()) out.push_back(std::move(l));
  }
  if (in.bad()) io_fail(path, 0, "read failure");
  if (out.empty()) io_fail(path, 0, "missing header");
  return out;
}

long long parse_count(const std::string& path, long no, const std::string& s) {
  try {
    std::size_t idx = 0;
    long long v = std::stoll(s, &idx);
    if (idx != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    io_fail(path, no, "not an integer: " + s);
  }
}

}  // namespace

StepOperator read_operator(const std::string& path) {
  auto ls = read_lines(path);
  const auto& h = ls[0].toks;
  if (h.size() != 3 || h[0] != "stepop" || h[1] != "v1" ||
      (h[2] != "inf" && h[2] != "fin"))
    io_fail(path, ls[0].no, "expected header: stepop v1 <inf|fin>");
  Ambient amb = h[2] == "inf" ? Ambient::Inf : Ambient::Fin;
  std::vector<Atom> atoms;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (ls[i].toks.size() != 2)
      io_fail(path, ls[i].no, "expected: value weight");
    try {
      atoms.push_back(Atom{rat_parse(ls[i].toks[0]), weight_parse(ls[i].toks[1])});
    } catch (const Error& e) {
      io_fail(path, ls[i].no, e.what());
    }
  }
  try {
    return make_operator(atoms, amb);
  } catch (const Error& e) {
    io_fail(path, ls[0].no, e.what());
  }
}

Profile read_profile(const std::string& path) {
  auto ls = read_lines(path);
  const auto& h = ls[0].toks;
  if (h.size() != 2 || h[0] != "profile" || h[1] != "v1")
    io_fail(path, ls[0].no, "expected header: profile v1");
  std::vector<PEntry> es;
  bool amb = false;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (ls[i].toks.size() != 2)
      io_fail(path, ls[i].no, "expected: value mult");
    Rat v;
    try {
      v = rat_parse(ls[i].toks[0]);
    } catch (const Error& e) {
      io_fail(path, ls[i].no, e.what());
    }
    if (ls[i].toks[1] == "inf") {
      es.push_back(PEntry{v, true, 0});
      amb = true;
    } else {
      long long mult = parse_count(path, ls[i].no, ls[i].toks[1]);
      if (mult < 1) io_fail(path, ls[i].no, "multiplicity must be positive");
      es.push_back(PEntry{v, false, mult});
    }
  }
  try {
    return make_profile(std::move(es), amb);
  } catch (const Error& e) {
    io_fail(path, ls[0].no, e.what());
  }
}

std::vector<Rat> read_vector(const std::string& path) {
  auto ls = read_lines(path);
  const auto& h = ls[0].toks;
  if (h.size() != 2 || h[0] != "vector" || h[1] != "v1")
    io_fail(path, ls[0].no, "expected header: vector v1");
  std::vector<Rat> out;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    for (const std::string& tok : ls[i].toks) {
      try {
        out.push_back(rat_parse(tok));
      } catch (const Error& e) {
        io_fail(path, ls[i].no, e.what());
      }
    }
  }
  if (out.empty()) io_fail(path, ls[0].no, "empty vector");
  return out;
}

RatMat read_matrix(const std::string& path) {
  auto ls = read_lines(path);
  const auto& h = ls[0].toks;
  if (h.size() != 4 || h[0] != "matrix" || h[1] != "v1")
    io_fail(path, ls[0].no, "expected header: matrix v1 n m");
  long long n = parse_count(path, ls[0].no, h[2]);
  long long m = parse_count(path, ls[0].no, h[3]);
  if (n < 1 || m < 1 || n > 1000 || m > 1000)
    io_fail(path, ls[0].no, "matrix dimensions out of range");
  std::vector<Rat> flat;
  flat.reserve((std::size_t)(n * m));
  for (std::size_t i = 1; i < ls.size(); ++i) {
    for (const std::string& tok : ls[i].toks) {
      if ((long long)flat.size() == n * m)
        io_fail(path, ls[i].no, "too many entries");
      try {
        flat.push_back(rat_parse(tok));
      } catch (const Error& e) {
        io_fail(path, ls[i].no, e.what());
      }
    }
  }
  if ((long long)flat.size() != n * m)
    io_fail(path, ls.back().no, "expected " + std::to_string(n * m) + " entries");
  RatMat M((std::size_t)n, std::vector<Rat>((std::size_t)m));
  for (long long i = 0; i < n; ++i)
    for (long long j = 0; j < m; ++j)
      M[(std::size_t)i][(std::size_t)j] = flat[(std::size_t)(i * m + j)];
  return M;
}

void write_operator(std::ostream& os, const StepOperator& op) {
  os << "stepop v1 " << (op.ambient == Ambient::Inf ? "inf" : "fin") << "\n";
  for (const Atom& at : op.atoms)
    os << rat_str(at.value) << " " << wstr(at.weight) << "\n";
}

void write_profile(std::ostream& os, const Profile& p) {
  os << "profile v1\n";
  for (const PEntry& e : p.entries) {
    os << rat_str(e.value) << " ";
    if (e.inf_mult)
      os << "inf\n";
    else
      os << e.mult << "\n";
  }
}

void write_vector(std::ostream& os, const std::vector<Rat>& v) {
  os << "vector v1\n";
  for (std::size_t i = 0; i < v.size(); ++i)
    os << rat_str(v[i]) << (i + 1 == v.size() ? "\n" : " ");
}

void write_matrix(std::ostream& os, const RatMat& M) {
  os << "matrix v1 " << M.size() << " " << (M.empty() ? 0 : M[0].size()) << "\n";
  for (const auto& row : M) {
    for (std::size_t j = 0; j < row.size(); ++j)
      os << rat_str(row[j]) << (j + 1 == row.size() ? "\n" : " ");
  }
}

std::string op_str(const StepOperator& op) {
  std::string s = op.ambient == Ambient::Inf ? "inf {" : "fin {";
  for (std::size_t i = 0; i < op.atoms.size(); ++i) {
    if (i) s += ", ";
    s += rat_str(op.atoms[i].value) + ":" + wstr(op.atoms[i].weight);
  }
  return s + "}";
}

void emit_curves(std::ostream& os, const StepOperator& a, const StepOperator& b) {
  PLFunction ua = u_fn(a), ub = u_fn(b), la = l_fn(a), lb = l_fn(b);
  std::set<Rat> ts;
  Rat last = 0;
  for (const PLFunction* f : {&ua, &ub, &la, &lb}) {
    for (const Knot& k : f->knots) ts.insert(k.t);
    last = std::max(last, f->last_t());
  }
  for (int j = 1; j <= 10; ++j) ts.insert(last + j);
  os << "t,U_a,U_b,L_a,L_b\n";
  for (const Rat& t : ts)
    os << rat_decimal(t) << ',' << rat_decimal(ua.eval(t)) << ','
       << rat_decimal(ub.eval(t)) << ',' << rat_decimal(la.eval(t)) << ','
       << rat_decimal(lb.eval(t)) << "\n";
}

}  // namespace opmaj
