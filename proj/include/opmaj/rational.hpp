#pragma once

// Exact rational scalars, extended nonnegative weights, and the library-wide
// error type. Everything downstream does its bookkeeping in these types;
// doubles only appear at the dense matrix layer.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace opmaj {

using Rat = mpq_class;

// mpq_class lacks a long long constructor; go through long (64-bit here).
inline Rat rat_ll(long long v) { return Rat(static_cast<long>(v)); }

enum class Kind {
  InvalidAtom,
  InvalidInput,
  AmbientMismatch,
  NoEssentialSpectrum,
  IndeterminateTrace,
  FlagMismatch,
  RequiresCompact,
  RequiresPositive,
  NotMajorized,
  NotSubmajorized,
  OutOfRange,
  DecompositionFailed,
  FallbackExhausted,
  InternalInvariantViolation,
  IoError,
};

const char* kind_name(Kind k);

class Error : public std::runtime_error {
 public:
  Kind kind;
  Error(Kind k, const std::string& msg);
};

[[noreturn]] void fail(Kind k, const std::string& msg);

// Parses "p/q", an integer, or a plain decimal ("-2.75" -> -11/4, exact).
// No exponent forms. Throws Error(InvalidInput) on anything else.
Rat rat_parse(const std::string& s);

// Canonical form: "p/q" with q > 1, plain integer otherwise.
std::string rat_str(const Rat& r);

// Decimal rendering with the given number of significant digits.
std::string rat_decimal(const Rat& r, int sig_digits = 12);

double rat_dbl(const Rat& r);

// Exact rational value of the double (binary expansion). Finite inputs only.
Rat rat_of_double(double x);

// floor(r) as long long; OutOfRange if it does not fit.
long long rat_floor_ll(const Rat& r);

// Nonnegative rational extended with infinity. Addition absorbs infinity,
// infinity compares greater than every finite weight. The two indeterminate
// forms (inf - inf, inf * 0) are hard errors, never silent.
class Weight {
 public:
  Weight() : inf_(false), v_(0) {}
  Weight(const Rat& v);  // requires v >= 0
  Weight(long v) : Weight(Rat(v)) {}
  Weight(int v) : Weight(Rat(v)) {}
  static Weight inf();

  bool is_inf() const { return inf_; }
  bool is_zero() const { return !inf_ && v_ == 0; }
  const Rat& fin() const;  // finite value; error if infinite

  Weight& operator+=(const Weight& o);
  friend Weight operator+(Weight a, const Weight& b) { return a += b; }

  friend bool operator==(const Weight& a, const Weight& b);
  friend bool operator!=(const Weight& a, const Weight& b) { return !(a == b); }
  friend bool operator<(const Weight& a, const Weight& b);
  friend bool operator<=(const Weight& a, const Weight& b);
  friend bool operator>(const Weight& a, const Weight& b) { return b < a; }
  friend bool operator>=(const Weight& a, const Weight& b) { return b <= a; }

 private:
  bool inf_;
  Rat v_;
};

// a - b; requires a >= b, and inf - inf is an error.
Weight wsub(const Weight& a, const Weight& b);
// w * c for rational c >= 0; inf * 0 is an error.
Weight wmul(const Weight& w, const Rat& c);
Weight wmin(const Weight& a, const Weight& b);
Weight wmax(const Weight& a, const Weight& b);
// Comparison against a finite rational bound.
bool wlt(const Weight& w, const Rat& bound);   // w < bound
bool wge(const Weight& w, const Rat& bound);   // w >= bound
std::string wstr(const Weight& w);
// Parses "inf" or a rational; negativity rejected.
Weight weight_parse(const std::string& s);

// Signed extended rational for traces: -inf, finite, or +inf.
struct XRat {
  int cls = 0;  // -1: -inf, 0: finite, +1: +inf
  Rat v;        // meaningful iff cls == 0
  static XRat finite(const Rat& r) { return XRat{0, r}; }
  static XRat pos_inf() { return XRat{+1, Rat(0)}; }
  static XRat neg_inf() { return XRat{-1, Rat(0)}; }
  bool is_finite() const { return cls == 0; }
};
std::string xstr(const XRat& x);
bool xeq(const XRat& a, const XRat& b);

}  // namespace opmaj
