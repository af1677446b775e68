#include "opmaj/spectral.hpp"

#include <algorithm>

namespace opmaj {

StepOperator make_operator(std::vector<Atom> atoms, Ambient ambient) {
  StepOperator op;
  op.atoms = std::move(atoms);
  op.ambient = ambient;
  return normalize(op);
}

StepOperator normalize(const StepOperator& op) {
  if (op.atoms.empty()) fail(Kind::InvalidInput, "operator with no atoms");
  for (const auto& a : op.atoms)
    if (a.weight.is_zero())
      fail(Kind::InvalidAtom, "zero-weight atom at value " + rat_str(a.value));

  std::vector<Atom> sorted = op.atoms;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Atom& a, const Atom& b) { return a.value > b.value; });

  StepOperator out;
  out.ambient = op.ambient;
  for (const auto& a : sorted) {
    if (!out.atoms.empty() && out.atoms.back().value == a.value)
      out.atoms.back().weight += a.weight;
    else
      out.atoms.push_back(a);
  }

  bool has_inf = false;
  for (const auto& a : out.atoms) has_inf = has_inf || a.weight.is_inf();
  if (out.ambient == Ambient::Inf && !has_inf)
    fail(Kind::AmbientMismatch, "semifinite ambient requires an infinite atom");
  if (out.ambient == Ambient::Fin && has_inf)
    fail(Kind::AmbientMismatch, "finite-trace ambient forbids infinite atoms");
  return out;
}

StepOperator negate_op(const StepOperator& op) {
  StepOperator out = op;
  for (auto& a : out.atoms) a.value = -a.value;
  return normalize(out);
}

StepOperator abs_op(const StepOperator& op) {
  StepOperator out = op;
  for (auto& a : out.atoms) if (a.value < 0) a.value = -a.value;
  return normalize(out);
}

StepOperator shift_op(const StepOperator& op, const Rat& c) {
  StepOperator out = op;
  for (auto& a : out.atoms) a.value += c;
  return normalize(out);
}

StepOperator scale_op(const StepOperator& op, const Rat& c) {
  if (c < 0) fail(Kind::InvalidInput, "negative operator scale");
  StepOperator out = op;
  for (auto& a : out.atoms) a.value *= c;
  return normalize(out);
}

Weight total_weight(const StepOperator& op) {
  Weight w;
  for (const auto& a : op.atoms) w += a.weight;
  return w;
}

Rat sup_norm(const StepOperator& op) {
  Rat best(0);
  for (const auto& a : op.atoms) {
    Rat v = a.value < 0 ? Rat(-a.value) : a.value;
    if (v > best) best = v;
  }
  return best;
}

bool is_positive(const StepOperator& op) {
  for (const auto& a : op.atoms)
    if (a.value < 0) return false;
  return true;
}

Rat StepScale::value_at(const Rat& t) const {
  if (t < 0) fail(Kind::OutOfRange, "scale evaluated at negative time");
  Rat cum(0);
  for (const auto& p : pieces) {
    if (p.duration.is_inf()) return p.value;
    cum += p.duration.fin();
    if (t < cum) return p.value;
  }
  fail(Kind::InternalInvariantViolation, "scale without infinite tail");
}

StepScale upper_scale(const StepOperator& op) {
  StepScale s;
  s.monotone = Monotone::NonIncreasing;
  for (const auto& a : op.atoms) {
    s.pieces.push_back({a.weight, a.value});
    if (a.weight.is_inf()) return s;  // first infinite atom hides the rest
  }
  // finite trace: clamp at the last value forever
  s.pieces.back().duration = Weight::inf();
  return s;
}

StepScale lower_scale(const StepOperator& op) {
  StepScale s = upper_scale(negate_op(op));
  for (auto& p : s.pieces) p.value = -p.value;
  s.monotone = Monotone::NonDecreasing;
  return s;
}

StepScale singular_scale(const StepOperator& op) { return upper_scale(abs_op(op)); }

PLFunction integrate_scale(const StepScale& s) {
  PLFunction f;
  f.knots.push_back({Rat(0), Rat(0)});
  Rat t(0), y(0);
  for (const auto& p : s.pieces) {
    if (p.duration.is_inf()) {
      f.tail_slope = p.value;
      return f;
    }
    t += p.duration.fin();
    y += p.duration.fin() * p.value;
    f.knots.push_back({t, y});
  }
  fail(Kind::InternalInvariantViolation, "scale without infinite tail");
}

PLFunction u_fn(const StepOperator& op) { return integrate_scale(upper_scale(op)); }
PLFunction l_fn(const StepOperator& op) { return integrate_scale(lower_scale(op)); }

Rat PLFunction::eval(const Rat& t) const {
  if (t < 0) fail(Kind::OutOfRange, "evaluation at negative time");
  const Knot& last = knots.back();
  if (t >= last.t) return last.y + tail_slope * (t - last.t);
  // invariant: knots.front().t == 0, so t lands inside some segment
  size_t lo = 0, hi = knots.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (knots[mid].t <= t) lo = mid; else hi = mid;
  }
  const Knot& a = knots[lo];
  const Knot& b = knots[hi];
  return a.y + (b.y - a.y) * (t - a.t) / (b.t - a.t);
}

std::pair<Rat, Rat> ess_bounds(const StepOperator& op) {
  if (op.ambient != Ambient::Inf)
    fail(Kind::NoEssentialSpectrum, "finite-trace operator has no essential bounds");
  bool seen = false;
  Rat mn(0), mx(0);
  for (const auto& a : op.atoms) {
    if (!a.weight.is_inf()) continue;
    if (!seen) { mn = mx = a.value; seen = true; }
    else {
      if (a.value < mn) mn = a.value;
      if (a.value > mx) mx = a.value;
    }
  }
  if (!seen) fail(Kind::NoEssentialSpectrum, "no infinite atom");
  return {mn, mx};
}

std::pair<StepOperator, StepOperator> compact_parts(const StepOperator& op) {
  auto [mn, mx] = ess_bounds(op);
  StepOperator hi, lo;
  hi.ambient = lo.ambient = Ambient::Inf;
  for (const auto& a : op.atoms) {
    Rat vh = a.value - mx;
    Rat vl = mn - a.value;
    hi.atoms.push_back({vh > 0 ? vh : Rat(0), a.weight});
    lo.atoms.push_back({vl > 0 ? vl : Rat(0), a.weight});
  }
  return {normalize(hi), normalize(lo)};
}

Rat ks_norm(const StepOperator& op, const Rat& s) {
  if (s < 0) fail(Kind::OutOfRange, "ks_norm at negative time");
  return integrate_scale(singular_scale(op)).eval(s);
}

Weight trace_norm(const StepOperator& op) {
  Weight w;
  for (const auto& a : op.atoms) {
    if (a.value == 0) continue;
    w += wmul(a.weight, a.value < 0 ? Rat(-a.value) : a.value);
  }
  return w;
}

XRat trace(const StepOperator& op) {
  Weight pos, neg;
  for (const auto& a : op.atoms) {
    if (a.value > 0) pos += wmul(a.weight, a.value);
    if (a.value < 0) neg += wmul(a.weight, Rat(-a.value));
  }
  if (pos.is_inf() && neg.is_inf())
    fail(Kind::IndeterminateTrace, "both signed trace parts infinite");
  if (pos.is_inf()) return XRat::pos_inf();
  if (neg.is_inf()) return XRat::neg_inf();
  return XRat::finite(pos.fin() - neg.fin());
}

bool is_tau_compact(const StepOperator& op) {
  if (op.ambient == Ambient::Fin) return true;
  for (const auto& a : op.atoms)
    if (a.weight.is_inf() && a.value != 0) return false;
  return true;
}

bool is_trace_class(const StepOperator& op) { return !trace_norm(op).is_inf(); }

NbhdCert in_nbhd(const StepOperator& op, const Rat& eps, const Rat& delta) {
  if (eps <= 0 || delta <= 0)
    fail(Kind::InvalidInput, "neighborhood parameters must be positive");
  Weight bad;
  for (const auto& a : op.atoms) {
    Rat v = a.value < 0 ? Rat(-a.value) : a.value;
    if (v >= eps) bad += a.weight;
  }
  return {eps, delta, bad, wlt(bad, delta)};
}

FlaggedOperator flag_of(const StepOperator& op) {
  FlaggedOperator f;
  for (const auto& a : op.atoms) f.cells.push_back({a.value, a.weight});
  return f;
}

StepOperator op_of_flag(const FlaggedOperator& f) {
  if (f.cells.empty()) fail(Kind::InvalidInput, "empty flag");
  std::vector<Atom> atoms;
  Weight total;
  for (const auto& c : f.cells) {
    atoms.push_back({c.value, c.weight});
    total += c.weight;
  }
  return make_operator(std::move(atoms), total.is_inf() ? Ambient::Inf : Ambient::Fin);
}

namespace {

// Walks two cell lists along their common refinement, combining values.
// Finite cells split against each other; an infinite cell absorbs finite
// counterparts; two infinite cells pair off, except that a trailing infinite
// cell keeps absorbing the other side's remaining cells.
template <class F>
FlaggedOperator flag_zip(const FlaggedOperator& x, const FlaggedOperator& y, F combine) {
  const auto& xc = x.cells;
  const auto& yc = y.cells;
  if (xc.empty() || yc.empty()) fail(Kind::FlagMismatch, "empty flag");
  size_t i = 0, j = 0;
  Weight rx = xc[0].weight, ry = yc[0].weight;
  bool x_matched_inf = false, y_matched_inf = false;
  FlaggedOperator out;
  while (true) {
    bool xdone = i >= xc.size(), ydone = j >= yc.size();
    if (xdone && ydone) break;
    if (ydone) {
      if (i + 1 == xc.size() && rx.is_inf() && x_matched_inf) break;
      fail(Kind::FlagMismatch, "flags misaligned before list end");
    }
    if (xdone) {
      if (j + 1 == yc.size() && ry.is_inf() && y_matched_inf) break;
      fail(Kind::FlagMismatch, "flags misaligned before list end");
    }
    Rat v = combine(xc[i].value, yc[j].value);
    bool xinf = rx.is_inf(), yinf = ry.is_inf();
    if (!xinf && !yinf) {
      Weight w = wmin(rx, ry);
      out.cells.push_back({v, w});
      rx = wsub(rx, w);
      ry = wsub(ry, w);
      if (rx.is_zero()) {
        ++i;
        x_matched_inf = false;
        if (i < xc.size()) rx = xc[i].weight;
      }
      if (ry.is_zero()) {
        ++j;
        y_matched_inf = false;
        if (j < yc.size()) ry = yc[j].weight;
      }
    } else if (xinf && !yinf) {
      out.cells.push_back({v, ry});
      ++j;
      y_matched_inf = false;
      if (j < yc.size()) ry = yc[j].weight;
    } else if (!xinf && yinf) {
      out.cells.push_back({v, rx});
      ++i;
      x_matched_inf = false;
      if (i < xc.size()) rx = xc[i].weight;
    } else {
      out.cells.push_back({v, Weight::inf()});
      x_matched_inf = y_matched_inf = true;
      bool xlast = i + 1 == xc.size(), ylast = j + 1 == yc.size();
      if (xlast && !ylast) {
        ++j;
        y_matched_inf = false;
        ry = yc[j].weight;
      } else if (ylast && !xlast) {
        ++i;
        x_matched_inf = false;
        rx = xc[i].weight;
      } else {
        ++i;
        ++j;
        if (i < xc.size()) rx = xc[i].weight;
        if (j < yc.size()) ry = yc[j].weight;
      }
    }
  }
  return out;
}

}  // namespace

FlaggedOperator flag_sub(const FlaggedOperator& x, const FlaggedOperator& y) {
  return flag_zip(x, y, [](const Rat& a, const Rat& b) { return Rat(a - b); });
}

FlaggedOperator flag_combine(const Rat& gamma, const FlaggedOperator& x,
                             const FlaggedOperator& y) {
  if (gamma < 0 || gamma > 1)
    fail(Kind::InvalidInput, "combination weight outside [0,1]");
  return flag_zip(x, y, [&gamma](const Rat& a, const Rat& b) {
    return Rat(gamma * a + (1 - gamma) * b);
  });
}

StepOperator spectral_pad(const StepOperator& x, const StepScale& pad) {
  if (x.ambient != Ambient::Inf)
    fail(Kind::AmbientMismatch, "padding needs the semifinite ambient");
  if (!is_positive(x)) fail(Kind::RequiresPositive, "padding needs a positive operator");
  if (!is_tau_compact(x)) fail(Kind::RequiresCompact, "padding needs a tau-compact operator");
  if (pad.pieces.empty() || !pad.pieces.back().duration.is_inf())
    fail(Kind::InvalidInput, "pad must end with an infinite piece");
  Rat prev;
  bool first = true, any_pos = false;
  for (size_t k = 0; k < pad.pieces.size(); ++k) {
    const auto& p = pad.pieces[k];
    if (p.value < 0) fail(Kind::InvalidInput, "pad values must be nonnegative");
    if (p.value > 0) any_pos = true;
    if (!first && p.value > prev) fail(Kind::InvalidInput, "pad must be non-increasing");
    if (k + 1 < pad.pieces.size() && p.duration.is_inf())
      fail(Kind::InvalidInput, "infinite pad piece before the end");
    if (p.duration.is_zero()) fail(Kind::InvalidInput, "zero-duration pad piece");
    prev = p.value;
    first = false;
  }
  if (!any_pos) fail(Kind::InvalidInput, "pad is identically zero");

  const auto& p1 = upper_scale(x).pieces;
  const auto& p2 = pad.pieces;
  std::vector<Atom> atoms;
  size_t i = 0, j = 0;
  Weight rx = p1[0].duration, ry = p2[0].duration;
  while (true) {
    Rat v = p1[i].value + p2[j].value;
    if (rx.is_inf() && ry.is_inf()) {
      atoms.push_back({v, Weight::inf()});
      break;
    }
    if (rx.is_inf()) {
      atoms.push_back({v, ry});
      ++j;
      ry = p2[j].duration;
      continue;
    }
    if (ry.is_inf()) {
      atoms.push_back({v, rx});
      ++i;
      rx = p1[i].duration;
      continue;
    }
    Weight w = wmin(rx, ry);
    atoms.push_back({v, w});
    rx = wsub(rx, w);
    ry = wsub(ry, w);
    if (rx.is_zero()) { ++i; rx = p1[i].duration; }
    if (ry.is_zero()) { ++j; ry = p2[j].duration; }
  }
  return make_operator(std::move(atoms), Ambient::Inf);
}

}  // namespace opmaj
