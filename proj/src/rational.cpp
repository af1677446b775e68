#include "opmaj/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace opmaj {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::InvalidAtom: return "InvalidAtom";
    case Kind::InvalidInput: return "InvalidInput";
    case Kind::AmbientMismatch: return "AmbientMismatch";
    case Kind::NoEssentialSpectrum: return "NoEssentialSpectrum";
    case Kind::IndeterminateTrace: return "IndeterminateTrace";
    case Kind::FlagMismatch: return "FlagMismatch";
    case Kind::RequiresCompact: return "RequiresCompact";
    case Kind::RequiresPositive: return "RequiresPositive";
    case Kind::NotMajorized: return "NotMajorized";
    case Kind::NotSubmajorized: return "NotSubmajorized";
    case Kind::OutOfRange: return "OutOfRange";
    case Kind::DecompositionFailed: return "DecompositionFailed";
    case Kind::FallbackExhausted: return "FallbackExhausted";
    case Kind::InternalInvariantViolation: return "InternalInvariantViolation";
    case Kind::IoError: return "IoError";
  }
  return "UnknownError";
}

Error::Error(Kind k, const std::string& msg)
    : std::runtime_error(std::string(kind_name(k)) + ": " + msg), kind(k) {}

void fail(Kind k, const std::string& msg) { throw Error(k, msg); }

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rat rat_parse(const std::string& s) {
  if (s.empty()) fail(Kind::InvalidInput, "empty number");
  std::string body = s;
  bool neg = false;
  if (body[0] == '+' || body[0] == '-') {
    neg = body[0] == '-';
    body = body.substr(1);
  }
  if (body.empty()) fail(Kind::InvalidInput, "bare sign in number '" + s + "'");

  auto slash = body.find('/');
  Rat r;
  if (slash != std::string::npos) {
    std::string num = body.substr(0, slash);
    std::string den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
      fail(Kind::InvalidInput, "malformed rational '" + s + "'");
    mpz_class n(num), d(den);
    if (d == 0) fail(Kind::InvalidInput, "zero denominator in '" + s + "'");
    r = Rat(n, d);
    r.canonicalize();
  } else {
    auto dot = body.find('.');
    if (dot == std::string::npos) {
      if (!all_digits(body)) fail(Kind::InvalidInput, "malformed number '" + s + "'");
      r = Rat(mpz_class(body));
    } else {
      std::string ip = body.substr(0, dot);
      std::string fp = body.substr(dot + 1);
      if (ip.empty() && fp.empty())
        fail(Kind::InvalidInput, "malformed decimal '" + s + "'");
      if (!ip.empty() && !all_digits(ip))
        fail(Kind::InvalidInput, "malformed decimal '" + s + "'");
      if (!fp.empty() && !all_digits(fp))
        fail(Kind::InvalidInput, "malformed decimal '" + s + "'");
      mpz_class scale = 1;
      for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
      mpz_class n = (ip.empty() ? mpz_class(0) : mpz_class(ip)) * scale +
                    (fp.empty() ? mpz_class(0) : mpz_class(fp));
      r = Rat(n, scale);
      r.canonicalize();
    }
  }
  if (neg) r = -r;
  return r;
}

std::string rat_str(const Rat& r) {
  Rat c = r;  // inputs built with the two-argument constructor may be uncanceled
  c.canonicalize();
  return c.get_str();
}

std::string rat_decimal(const Rat& r, int sig_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", sig_digits, rat_dbl(r));
  return buf;
}

double rat_dbl(const Rat& r) { return r.get_d(); }

Rat rat_of_double(double x) {
  if (!std::isfinite(x)) fail(Kind::InvalidInput, "non-finite double");
  Rat r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

long long rat_floor_ll(const Rat& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  if (!q.fits_slong_p()) fail(Kind::OutOfRange, "floor does not fit a machine integer");
  return static_cast<long long>(q.get_si());
}

Weight::Weight(const Rat& v) : inf_(false), v_(v) {
  if (v < 0) fail(Kind::InvalidInput, "negative weight " + rat_str(v));
}

Weight Weight::inf() {
  Weight w;
  w.inf_ = true;
  return w;
}

const Rat& Weight::fin() const {
  if (inf_) fail(Kind::InvalidInput, "infinite weight used as finite");
  return v_;
}

Weight& Weight::operator+=(const Weight& o) {
  if (o.inf_) inf_ = true;
  if (!inf_) v_ += o.v_;
  return *this;
}

bool operator==(const Weight& a, const Weight& b) {
  if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
  return a.v_ == b.v_;
}

bool operator<(const Weight& a, const Weight& b) {
  if (a.inf_) return false;
  if (b.inf_) return true;
  return a.v_ < b.v_;
}

bool operator<=(const Weight& a, const Weight& b) { return a < b || a == b; }

Weight wsub(const Weight& a, const Weight& b) {
  if (b.is_inf()) {
    fail(Kind::InvalidInput, a.is_inf() ? "indeterminate inf - inf"
                                        : "negative weight from subtraction");
  }
  if (a.is_inf()) return Weight::inf();
  if (a.fin() < b.fin()) fail(Kind::InvalidInput, "negative weight from subtraction");
  return Weight(Rat(a.fin() - b.fin()));
}

Weight wmul(const Weight& w, const Rat& c) {
  if (c < 0) fail(Kind::InvalidInput, "negative weight scale");
  if (w.is_inf()) {
    if (c == 0) fail(Kind::InvalidInput, "indeterminate inf * 0");
    return Weight::inf();
  }
  return Weight(Rat(w.fin() * c));
}

Weight wmin(const Weight& a, const Weight& b) { return a < b ? a : b; }
Weight wmax(const Weight& a, const Weight& b) { return a < b ? b : a; }

bool wlt(const Weight& w, const Rat& bound) { return !w.is_inf() && w.fin() < bound; }
bool wge(const Weight& w, const Rat& bound) { return !wlt(w, bound); }

std::string wstr(const Weight& w) { return w.is_inf() ? "inf" : rat_str(w.fin()); }

Weight weight_parse(const std::string& s) {
  if (s == "inf") return Weight::inf();
  Rat r = rat_parse(s);
  if (r < 0) fail(Kind::InvalidInput, "negative weight '" + s + "'");
  return Weight(r);
}

std::string xstr(const XRat& x) {
  if (x.cls > 0) return "inf";
  if (x.cls < 0) return "-inf";
  return rat_str(x.v);
}

bool xeq(const XRat& a, const XRat& b) {
  if (a.cls != b.cls) return false;
  return a.cls != 0 || a.v == b.v;
}

}  // namespace opmaj
