#include "opmaj/discretize.hpp"

#include <algorithm>
#include <utility>

namespace opmaj {

namespace {

long long rat_ceil_ll(const Rat& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  if (!q.fits_slong_p()) fail(Kind::OutOfRange, "ceiling does not fit a machine integer");
  return q.get_si();
}

struct VChunk {
  Rat v;
  Rat w;  // positive finite
};

// Takes amount of mass off the top of a canonical descending atom list.
// Infinite atoms supply without depletion and survive into the rest.
std::pair<std::vector<VChunk>, std::vector<Atom>> consume_top(
    const std::vector<Atom>& atoms, const Rat& amount) {
  std::vector<VChunk> chunks;
  std::vector<Atom> rest;
  Rat need = amount;
  std::size_t i = 0;
  for (; i < atoms.size() && need > 0; ++i) {
    const Atom& at = atoms[i];
    if (at.weight.is_inf()) {
      chunks.push_back(VChunk{at.value, need});
      need = 0;
      rest.push_back(at);
      ++i;
      break;
    }
    Rat take = std::min(at.weight.fin(), need);
    if (take > 0) chunks.push_back(VChunk{at.value, take});
    need -= take;
    Rat left = at.weight.fin() - take;
    if (left > 0) rest.push_back(Atom{at.value, Weight(left)});
  }
  if (need > 0)
    fail(Kind::InternalInvariantViolation, "insufficient mass for flag consumption");
  for (; i < atoms.size(); ++i) rest.push_back(atoms[i]);
  return {std::move(chunks), std::move(rest)};
}

// Same from the bottom; chunks come out ascending.
std::pair<std::vector<VChunk>, std::vector<Atom>> consume_bottom(
    const std::vector<Atom>& atoms, const Rat& amount) {
  std::vector<VChunk> chunks;
  std::vector<Atom> rest_rev;
  Rat need = amount;
  auto it = atoms.rbegin();
  for (; it != atoms.rend() && need > 0; ++it) {
    if (it->weight.is_inf()) {
      chunks.push_back(VChunk{it->value, need});
      need = 0;
      rest_rev.push_back(*it);
      ++it;
      break;
    }
    Rat take = std::min(it->weight.fin(), need);
    if (take > 0) chunks.push_back(VChunk{it->value, take});
    need -= take;
    Rat left = it->weight.fin() - take;
    if (left > 0) rest_rev.push_back(Atom{it->value, Weight(left)});
  }
  if (need > 0)
    fail(Kind::InternalInvariantViolation, "insufficient mass for flag consumption");
  for (; it != atoms.rend(); ++it) rest_rev.push_back(*it);
  std::reverse(rest_rev.begin(), rest_rev.end());
  return {std::move(chunks), std::move(rest_rev)};
}

std::vector<std::vector<Atom>> bin_atoms(const std::vector<Atom>& rest,
                                         const IntervalPartition& part) {
  std::vector<std::vector<Atom>> bins(part.cells.size());
  for (const Atom& at : rest) {
    bool placed = false;
    for (std::size_t c = 0; c < part.cells.size(); ++c) {
      if (interval_contains(part.cells[c], at.value)) {
        bins[c].push_back(at);
        placed = true;
        break;
      }
    }
    if (!placed)
      fail(Kind::InternalInvariantViolation, "remainder value escapes the band");
  }
  return bins;
}

std::vector<CountRow> rows_of_bins(const std::vector<std::vector<Atom>>& bins,
                                   const Rat& unit) {
  std::vector<CountRow> rows(bins.size());
  for (std::size_t c = 0; c < bins.size(); ++c) {
    Weight mass;
    for (const Atom& at : bins[c]) mass += at.weight;
    CountRow& row = rows[c];
    row.mass = mass;
    if (mass.is_inf()) {
      row.inf_count = true;
    } else {
      row.count = rat_floor_ll(mass.fin() / unit);
      row.remainder = mass.fin() - rat_ll(row.count) * unit;
    }
  }
  return rows;
}

// Run-length encodes a monotone coefficient list into profile entries.
void append_runs(std::vector<PEntry>& es, const std::vector<Rat>& vals) {
  std::size_t i = 0;
  while (i < vals.size()) {
    std::size_t j = i + 1;
    while (j < vals.size() && vals[j] == vals[i]) ++j;
    es.push_back(PEntry{vals[i], false, (long long)(j - i)});
    i = j;
  }
}

Profile side_profile(const std::vector<Rat>& up, const std::vector<Rat>* low,
                     const std::vector<CountRow>& rows,
                     const IntervalPartition& part) {
  std::vector<PEntry> es;
  append_runs(es, up);
  if (low) append_runs(es, *low);
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (rows[c].inf_count)
      es.push_back(PEntry{part.cells[c].gamma, true, 0});
    else if (rows[c].count > 0)
      es.push_back(PEntry{part.cells[c].gamma, false, rows[c].count});
  }
  return make_profile(std::move(es), true);
}

// Aligned actual/approximant cell lists; weights stay in lockstep so the
// flag difference is well defined.
struct CellSink {
  FlaggedOperator X, A;
  void emit(const Rat& xv, const Rat& av, const Weight& w) {
    if (w.is_zero()) return;
    if (!w.is_inf() && !X.cells.empty() && !X.cells.back().weight.is_inf() &&
        X.cells.back().value == xv && A.cells.back().value == av) {
      X.cells.back().weight += w;
      A.cells.back().weight += w;
    } else {
      X.cells.push_back(FlagCell{xv, w});
      A.cells.push_back(FlagCell{av, w});
    }
  }
};

// Pairs consumed chunks with flag slot coefficients. Interior slots agree
// with the chunk value exactly (the coefficient is the slot average), so
// whole runs collapse; boundary slots are split piecewise.
void sink_flags(CellSink& sink, const std::vector<VChunk>& chunks,
                const std::vector<Rat>& coeffs, const Rat& unit) {
  std::size_t ci = 0;
  Rat left = chunks.empty() ? Rat(0) : chunks[0].w;
  std::size_t j = 0;
  while (j < coeffs.size()) {
    if (left == 0) {
      if (++ci >= chunks.size())
        fail(Kind::InternalInvariantViolation, "flag slots misaligned");
      left = chunks[ci].w;
      continue;
    }
    if (left >= unit && coeffs[j] == chunks[ci].v) {
      long long full = rat_floor_ll(left / unit);
      long long run = std::min<long long>(full, (long long)(coeffs.size() - j));
      // coefficients are monotone, so equal endpoints force an equal run
      if (coeffs[j + (std::size_t)run - 1] == chunks[ci].v) {
        Rat w = rat_ll(run) * unit;
        sink.emit(chunks[ci].v, chunks[ci].v, Weight(w));
        left -= w;
        j += (std::size_t)run;
        continue;
      }
    }
    Rat slot_left = unit;
    while (slot_left > 0) {
      if (left == 0) {
        if (++ci >= chunks.size())
          fail(Kind::InternalInvariantViolation, "flag slots misaligned");
        left = chunks[ci].w;
      }
      Rat take = std::min(slot_left, left);
      sink.emit(chunks[ci].v, coeffs[j], Weight(take));
      slot_left -= take;
      left -= take;
    }
    ++j;
  }
  if (left != 0) fail(Kind::InternalInvariantViolation, "flag slots misaligned");
}

struct SideCells {
  FlaggedOperator X, A;
};

SideCells build_cells(const std::vector<VChunk>& top, const std::vector<Rat>& up,
                      const std::vector<VChunk>* bot, const std::vector<Rat>* low,
                      const std::vector<std::vector<Atom>>& bins,
                      const std::vector<CountRow>& rows,
                      const std::vector<Rat>& gammas, const Rat& unit,
                      long long hold_cell, const Rat& hold_amt) {
  CellSink sink;
  sink_flags(sink, top, up, unit);
  if (bot) sink_flags(sink, *bot, *low, unit);
  for (std::size_t c = 0; c < bins.size(); ++c) {
    const Rat& gam = gammas[c];
    Rat hold_left = ((long long)c == hold_cell) ? hold_amt : Rat(0);
    if (rows[c].inf_count) {
      for (const Atom& at : bins[c]) {
        if (hold_left > 0 && at.weight.is_inf()) {
          sink.emit(at.value, Rat(0), Weight(hold_left));
          hold_left = 0;
        }
        sink.emit(at.value, gam, at.weight);
      }
      if (hold_left > 0)
        fail(Kind::InternalInvariantViolation, "withholding cell lacks essential mass");
    } else {
      if (hold_left > 0)
        fail(Kind::InternalInvariantViolation, "withholding targets a finite cell");
      Rat cap = rat_ll(rows[c].count) * unit;
      for (const Atom& at : bins[c]) {
        Rat w = at.weight.fin();
        Rat take = std::min(w, cap);
        if (take > 0) {
          sink.emit(at.value, gam, Weight(take));
          cap -= take;
        }
        if (w - take > 0) sink.emit(at.value, Rat(0), Weight(w - take));
      }
      if (cap != 0)
        fail(Kind::InternalInvariantViolation, "interval capacity not exhausted");
    }
  }
  return SideCells{std::move(sink.X), std::move(sink.A)};
}

std::vector<Rat> base_gammas(const IntervalPartition& part) {
  std::vector<Rat> g;
  g.reserve(part.cells.size());
  for (const Interval& iv : part.cells) g.push_back(iv.gamma);
  return g;
}

std::vector<Rat> bumped_gammas(const IntervalPartition& part, const Rat& step,
                               int dir) {
  std::vector<Rat> g;
  g.reserve(part.cells.size());
  for (const Interval& iv : part.cells) {
    if (iv.pinned) {
      g.push_back(iv.gamma);
      continue;
    }
    Rat cand = iv.gamma + Rat(dir) * step;
    if (!interval_contains(iv, cand)) {
      if (dir > 0)
        cand = iv.hi_closed ? iv.hi : (iv.gamma + iv.hi) / 2;
      else
        cand = iv.lo_closed ? iv.lo : (iv.gamma + iv.lo) / 2;
    }
    g.push_back(cand);
  }
  return g;
}

}  // namespace

bool interval_contains(const Interval& iv, const Rat& v) {
  if (v < iv.lo || v > iv.hi) return false;
  if (v == iv.lo && !iv.lo_closed) return false;
  if (v == iv.hi && !iv.hi_closed) return false;
  return true;
}

Rat choose_t(const StepOperator& a, const StepOperator& b, long long m, bool weak) {
  if (m < 1) fail(Kind::InvalidInput, "resolution must be a positive integer");
  Rat thr = Rat(1) / rat_ll(m);
  auto pa = compact_parts(a);
  auto pb = compact_parts(b);
  std::vector<const StepOperator*> parts{&pa.first, &pb.first};
  if (!weak) {
    parts.push_back(&pa.second);
    parts.push_back(&pb.second);
  }
  Rat t = 0;
  for (const StepOperator* p : parts) {
    Weight w;
    for (const Atom& at : p->atoms)
      if (at.value >= thr) w += at.weight;
    if (w.is_inf())
      fail(Kind::InternalInvariantViolation, "compact part has infinite upper mass");
    t = std::max(t, w.fin());
  }
  if (t == 0) t = 1;
  return t;
}

long long choose_N(const Rat& t, long long m, const Rat& norm_b) {
  if (t <= 0 || m < 1 || norm_b < 0)
    fail(Kind::InvalidInput, "slot count needs t > 0, m >= 1, norm >= 0");
  Rat v = t * Rat(3) * rat_ll(m) * (Rat(2) * norm_b * rat_ll(m) + Rat(3));
  return std::max<long long>(rat_ceil_ll(v), 1);
}

std::vector<Rat> upper_coeffs(const StepOperator& x, const Rat& t, long long N) {
  if (!is_tau_compact(x))
    fail(Kind::RequiresCompact, "flag averages need a trace-compact operator");
  if (t <= 0 || N < 1) fail(Kind::InvalidInput, "slot layout needs t > 0 and N >= 1");
  // Top-t chunk list; a finite-trace operator short on mass clamps at its
  // smallest value, matching the clamped upper integral.
  std::vector<VChunk> chunks;
  Rat need = t;
  for (const Atom& at : x.atoms) {
    if (need == 0) break;
    if (at.weight.is_inf()) {
      chunks.push_back(VChunk{at.value, need});
      need = 0;
      break;
    }
    Rat take = std::min(at.weight.fin(), need);
    if (take > 0) chunks.push_back(VChunk{at.value, take});
    need -= take;
  }
  if (need > 0) chunks.push_back(VChunk{x.atoms.back().value, need});
  Rat unit = t / rat_ll(N);
  std::vector<Rat> alpha;
  alpha.reserve((std::size_t)N);
  std::size_t ci = 0;
  Rat left = chunks[0].w;
  long long j = 0;
  while (j < N) {
    if (left == 0) {
      if (++ci >= chunks.size())
        fail(Kind::InternalInvariantViolation, "slot grid overruns mass");
      left = chunks[ci].w;
      continue;
    }
    if (left >= unit) {
      long long full = rat_floor_ll(left / unit);
      long long run = std::min(full, N - j);
      for (long long r = 0; r < run; ++r) alpha.push_back(chunks[ci].v);
      left -= rat_ll(run) * unit;
      j += run;
      continue;
    }
    Rat slot_left = unit;
    Rat acc = 0;
    while (slot_left > 0) {
      if (left == 0) {
        if (++ci >= chunks.size())
          fail(Kind::InternalInvariantViolation, "slot grid overruns mass");
        left = chunks[ci].w;
      }
      Rat take = std::min(slot_left, left);
      acc += chunks[ci].v * take;
      slot_left -= take;
      left -= take;
    }
    alpha.push_back(acc / unit);
    ++j;
  }
  return alpha;
}

IntervalPartition build_partition(const StepOperator& b, long long m, bool weak) {
  if (m < 1) fail(Kind::InvalidInput, "resolution must be a positive integer");
  if (b.ambient != Ambient::Inf)
    fail(Kind::AmbientMismatch, "partition needs an ambient operator");
  if (weak && !is_positive(b))
    fail(Kind::RequiresPositive, "weak mode needs positive operators");
  auto eb = ess_bounds(b);
  Rat mn = weak ? Rat(0) : eb.first;
  Rat mx = eb.second;
  Rat h = Rat(1) / rat_ll(m);
  IntervalPartition part;
  part.cells.push_back(Interval{mn - h, mn, true, false, mn, true});
  if (mn == mx) {
    part.cells.push_back(Interval{mn, mn, true, true, mn, true});
  } else {
    Rat W = mx - mn;
    long long K = std::max<long long>(2, rat_ceil_ll(W * rat_ll(m)));
    Rat width = W / rat_ll(K);
    for (long long k = 0; k < K; ++k) {
      Interval iv;
      iv.lo = mn + rat_ll(k) * width;
      iv.hi = (k == K - 1) ? mx : mn + rat_ll(k + 1) * width;
      iv.lo_closed = true;
      iv.hi_closed = (k == K - 1);
      if (k == 0) {
        iv.gamma = mn;
        iv.pinned = true;
      } else if (k == K - 1) {
        iv.gamma = mx;
        iv.pinned = true;
      } else {
        iv.gamma = (iv.lo + iv.hi) / 2;
        bool found = false;
        for (const Atom& at : b.atoms) {
          if (!at.weight.is_inf() || !interval_contains(iv, at.value)) continue;
          if (!found || at.value > iv.gamma) iv.gamma = at.value;
          found = true;
        }
        iv.pinned = false;
      }
      part.cells.push_back(iv);
    }
  }
  part.cells.push_back(Interval{mx, mx + h, false, true, mx, true});
  return part;
}

std::vector<CountRow> interval_counts(const StepOperator& x, const Rat& t,
                                      long long N, const IntervalPartition& part,
                                      bool both_flags) {
  if (x.ambient != Ambient::Inf)
    fail(Kind::AmbientMismatch, "interval counts need an ambient operator");
  if (t <= 0 || N < 1) fail(Kind::InvalidInput, "slot layout needs t > 0 and N >= 1");
  auto top = consume_top(x.atoms, t);
  std::vector<Atom> rest = std::move(top.second);
  if (both_flags) {
    auto bo = consume_bottom(rest, t);
    rest = std::move(bo.second);
  }
  return rows_of_bins(bin_atoms(rest, part), t / rat_ll(N));
}

NbhdCert residual_certificate(const FlaggedOperator& X, const FlaggedOperator& A,
                              const Rat& eps, const Rat& delta) {
  return in_nbhd(op_of_flag(flag_sub(X, A)), eps, delta);
}

DiscretizationResult discretize_pair(const StepOperator& a, const StepOperator& b,
                                     long long m, bool weak) {
  if (m < 1) fail(Kind::InvalidInput, "resolution must be a positive integer");
  if (a.ambient != Ambient::Inf || b.ambient != Ambient::Inf)
    fail(Kind::AmbientMismatch, "discretization needs ambient operators");
  if (weak) {
    if (!is_positive(a) || !is_positive(b))
      fail(Kind::RequiresPositive, "weak discretization needs positive operators");
    if (!submajorizes(a, b))
      fail(Kind::NotSubmajorized, "pair is not weakly majorized");
  } else {
    if (!majorizes(a, b)) fail(Kind::NotMajorized, "pair is not majorized");
  }
  DiscretizationResult R;
  R.m = m;
  R.weak = weak;
  auto pa = compact_parts(a);
  auto pb = compact_parts(b);
  R.t = choose_t(a, b, m, weak);
  R.part = build_partition(b, m, weak);
  long long L = (long long)R.part.cells.size();
  // The fractional loss bound needs N >= 3 m t L; the default formula covers
  // every band except the short-but-not-degenerate corner where the cell
  // count is forced up to four middles plus guards.
  R.N = std::max(choose_N(R.t, m, sup_norm(b)),
                 rat_ceil_ll(Rat(3) * rat_ll(m) * R.t * rat_ll(L)));
  auto ea = ess_bounds(a);
  auto eb = ess_bounds(b);
  R.alpha_upper = upper_coeffs(pa.first, R.t, R.N);
  for (Rat& v : R.alpha_upper) v += ea.second;
  R.beta_upper = upper_coeffs(pb.first, R.t, R.N);
  for (Rat& v : R.beta_upper) v += eb.second;
  if (!weak) {
    R.alpha_lower = upper_coeffs(pa.second, R.t, R.N);
    for (Rat& v : R.alpha_lower) v = ea.first - v;
    R.beta_lower = upper_coeffs(pb.second, R.t, R.N);
    for (Rat& v : R.beta_lower) v = eb.first - v;
  }
  Rat unit = R.t / rat_ll(R.N);
  auto top_a = consume_top(a.atoms, R.t);
  auto top_b = consume_top(b.atoms, R.t);
  std::vector<VChunk> bot_a, bot_b;
  std::vector<Atom> rest_a = top_a.second, rest_b = top_b.second;
  if (!weak) {
    auto ba = consume_bottom(rest_a, R.t);
    bot_a = std::move(ba.first);
    rest_a = std::move(ba.second);
    auto bb = consume_bottom(rest_b, R.t);
    bot_b = std::move(bb.first);
    rest_b = std::move(bb.second);
  }
  auto bins_a = bin_atoms(rest_a, R.part);
  auto bins_b = bin_atoms(rest_b, R.part);
  R.counts_a = rows_of_bins(bins_a, unit);
  R.counts_b = rows_of_bins(bins_b, unit);
  R.remainder_a = 0;
  for (const CountRow& row : R.counts_a)
    if (!row.inf_count) R.remainder_a += row.remainder;
  R.remainder_b = 0;
  for (const CountRow& row : R.counts_b)
    if (!row.inf_count) R.remainder_b += row.remainder;
  auto pool_cell = [&](const Rat& v, const std::vector<CountRow>& rows) -> long long {
    for (std::size_t c = 0; c < R.part.cells.size(); ++c)
      if (rows[c].inf_count && interval_contains(R.part.cells[c], v))
        return (long long)c;
    fail(Kind::InternalInvariantViolation, "essential pool cell missing");
  };
  R.withheld_a = 0;
  R.withheld_b = 0;
  long long hold_a = -1, hold_b = -1;
  if (R.remainder_a > R.remainder_b) {
    R.withheld_b = R.remainder_a - R.remainder_b;
    hold_b = pool_cell(eb.second, R.counts_b);
  } else if (R.remainder_b > R.remainder_a) {
    R.withheld_a = R.remainder_b - R.remainder_a;
    hold_a = pool_cell(ea.second, R.counts_a);
  }
  R.remainder_total = std::max(R.remainder_a, R.remainder_b);
  R.f = side_profile(R.alpha_upper, weak ? nullptr : &R.alpha_lower, R.counts_a,
                     R.part);
  R.g = side_profile(R.beta_upper, weak ? nullptr : &R.beta_lower, R.counts_b,
                     R.part);
  bool rel = weak ? prof_submajorizes(R.f, R.g) : prof_majorizes(R.f, R.g);
  if (!rel)
    fail(Kind::InternalInvariantViolation, "discretized profiles lose the order");
  Rat h = Rat(1) / rat_ll(m);
  auto run_side = [&](const std::vector<VChunk>& top, const std::vector<Rat>& up,
                      const std::vector<VChunk>* bot, const std::vector<Rat>* low,
                      const std::vector<std::vector<Atom>>& bins,
                      const std::vector<CountRow>& rows, long long hold_cell,
                      const Rat& hold_amt, int bump_dir,
                      const char* label) -> std::pair<SideCells, NbhdCert> {
    SideCells sc = build_cells(top, up, bot, low, bins, rows, base_gammas(R.part),
                               unit, hold_cell, hold_amt);
    const std::pair<Rat, Rat> rungs[3] = {{h, h}, {h, 2 * h}, {2 * h, 2 * h}};
    for (const auto& rung : rungs) {
      NbhdCert cert = residual_certificate(sc.X, sc.A, rung.first, rung.second);
      if (cert.member) {
        R.slack_ledger.push_back(SlackLine{label, rung.first, rung.second});
        return {std::move(sc), cert};
      }
    }
    // Unreached in practice: aligned deviations stay below 2/m with margin.
    // Nudging unpinned representatives is the remaining lever.
    SideCells sb = build_cells(top, up, bot, low, bins, rows,
                               bumped_gammas(R.part, h / 2, bump_dir), unit,
                               hold_cell, hold_amt);
    NbhdCert cert = residual_certificate(sb.X, sb.A, 2 * h, 2 * h);
    if (cert.member) {
      R.slack_ledger.push_back(SlackLine{"gamma-bump", h / 2, Rat(0)});
      R.slack_ledger.push_back(SlackLine{label, 2 * h, 2 * h});
      return {std::move(sb), cert};
    }
    fail(Kind::FallbackExhausted, "certificate ladder exhausted");
  };
  auto side_a = run_side(top_a.first, R.alpha_upper, weak ? nullptr : &bot_a,
                         weak ? nullptr : &R.alpha_lower, bins_a, R.counts_a,
                         hold_a, R.withheld_a, -1, "cert-a");
  auto side_b = run_side(top_b.first, R.beta_upper, weak ? nullptr : &bot_b,
                         weak ? nullptr : &R.beta_lower, bins_b, R.counts_b,
                         hold_b, R.withheld_b, +1, "cert-b");
  R.actual_a = std::move(side_a.first.X);
  R.approx_a = std::move(side_a.first.A);
  R.cert_a = side_a.second;
  R.actual_b = std::move(side_b.first.X);
  R.approx_b = std::move(side_b.first.A);
  R.cert_b = side_b.second;
  return R;
}

}  // namespace opmaj
