#pragma once

// Witness points with simultaneously controlled orbits under two transversal
// hyperbolic automorphisms.
//
// Inputs: an avoidance box built for one automorphism (the "box map") and a
// family of probe targets for a second automorphism whose contracting
// direction is transversal to the first.  The goal is a single point that
//
//   * lies on a contracting-direction segment of the box map that misses
//     every inverse-iterate tube up to the view depth, so its forward box-map
//     orbit avoids the open box to that depth (certified separately), and
//   * has a forward orbit under the probe map that enters every probe
//     rectangle within a configured iterate horizon.
//
// Construction: the probe map's contracting leaf through a probe center is
// expanded by inverse iteration (in whole periods of the center) until it
// crosses the target segment; each crossing is a candidate witness.  A
// crossing point x = r + t*v satisfies S^j x = S^j r + t*lambda^j v exactly
// (v the contracting column, lambda the contracting eigenvalue), so its whole
// forward orbit is the periodic orbit of the center plus an explicitly known
// contracting correction.  First entries into every probe are therefore
// decidable in closed form: the head of the orbit is walked directly, and in
// the tail the correction term is compared against each probe rectangle one
// residue class at a time, with the geometric inequality resolved exactly.
// Candidates are retried in order of leaf-parameter magnitude (extending the
// leaf when a batch is exhausted) until one orbit visits every probe within
// the horizon; if the configured budgets run out the search reports failure
// honestly instead of weakening the requirement.
//
// All arithmetic is exact.  The scalar type K is QuadExt when both maps share
// one quadratic field and TowerExt when their fields are distinct.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toraldyn/fractal.hpp"

namespace toraldyn {

struct TransversalityViolated : std::runtime_error {
  explicit TransversalityViolated(const std::string& what) : std::runtime_error(what) {}
};
struct IterationBudgetExceeded : std::runtime_error {
  explicit IterationBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};
class AvoidanceFailed : public std::runtime_error {
 public:
  explicit AvoidanceFailed(long step)
      : std::runtime_error("orbit enters the open box at iterate " + std::to_string(step)),
        step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// ---------------------------------------------------------------------------
// Probes: open eigenframe squares of certified diameter around a rational
// periodic point of the probe map.

struct DenseProbe {
  PositivizedAuto aut;  // positivized probe automorphism
  RatVec2 center;       // rational probe center, reduced mod 1
  long ell = 0;         // requested diameter bound 1/ell
  long period = 0;      // period of the center under aut.work.M
  Rational half;        // half-side of the open square in the eigenframe
};

// Squared-norm bound for the eigenframe diagonals: the images of the frame
// square's diagonals are 2a*(2, s0+s1) and 2a*(0, s0-s1), and both squared
// norms are symmetric in the eigenvalues, hence rational.
inline Rational probe_norm_bound(const ToralAuto& work) {
  const QuadExt sum = work.slope_plus + work.slope_minus;
  const QuadExt dif = work.slope_plus - work.slope_minus;
  const QuadExt n1 = QuadExt(4) + sum * sum;
  const QuadExt n2 = dif * dif;
  const QuadExt nm = (n1 < n2) ? n2 : n1;
  if (sgn(nm.b()) != 0)
    throw InvariantViolation("eigenframe diagonal norm bound is not rational");
  return nm.a();
}

// Largest halving-ladder half-side a <= 1/(2*ell) whose open frame square has
// plane diameter at most 1/ell: certified via 4*a^2*nm <= 1/ell^2.
inline Rational probe_half_side(const ToralAuto& work, long ell) {
  if (ell <= 0) throw std::invalid_argument("probe diameter denominator must be positive");
  const Rational nm = probe_norm_bound(work);
  const Rational target = Rational(1) / (Rational(ell) * Rational(ell));
  Rational a = Rational(1) / Rational(2 * ell);
  while (4 * a * a * nm > target) a /= 2;
  return a;
}

inline DenseProbe make_probe(const IntMat2& S, const RatVec2& center, long ell) {
  DenseProbe p;
  p.aut = positivize(S);
  p.center = reduce_mod1(center);
  p.ell = ell;
  p.half = probe_half_side(p.aut.work, ell);
  p.period = orbit_of(p.aut.work.M, p.center).period;
  return p;
}

// Open probe square in the given eigenframe of the probe map.
template <class K>
FrameRect<K> probe_rect(const DenseProbe& p, const Frame<K>& fS) {
  const Vec2<K> c = fS.to_frame(fS.promote_point(p.center));
  const K h{p.half};
  return {KInterval<K>::open(c.x - h, c.x + h), KInterval<K>::open(c.y - h, c.y + h)};
}

// Inverse image of the probe square under `iterate` forward steps, for
// iterates that are whole periods of the center (the center is then fixed and
// the square stretches along the contracting column while flattening along
// the expanding one).
template <class K>
FrameRect<K> probe_rect_pulled(const DenseProbe& p, const Frame<K>& fS,
                               const FieldTag& tag, long iterate) {
  if (iterate < 0 || p.period <= 0 || iterate % p.period != 0)
    throw std::invalid_argument("pulled probe iterate must be a nonnegative multiple of the period");
  const Vec2<K> c = fS.to_frame(fS.promote_point(p.center));
  const unsigned j = static_cast<unsigned>(iterate);
  const K hu = K(p.half) * promote_quad<K>(p.aut.work.lambda_minus.pow(j), tag);
  const K hw = K(p.half) * promote_quad<K>(p.aut.work.lambda_plus.pow(j), tag);
  return {KInterval<K>::open(c.x - hu, c.x + hu), KInterval<K>::open(c.y - hw, c.y + hw)};
}

// ---------------------------------------------------------------------------
// Exact mod-1 reduction and small shared helpers.

template <class K>
Vec2<K> reduce_mod1_pt(const Vec2<K>& p) {
  return {p.x - K(Rational(floor_of(p.x))), p.y - K(Rational(floor_of(p.y)))};
}

namespace detail {

template <class K>
Vec2<K> lattice_lift(const IntVec2& k) {
  return {K(Rational(k.x)), K(Rational(k.y))};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Expanding the contracting leaf of a probe center until it crosses a target
// segment.

struct LeafCutOptions {
  long max_rounds = 12;            // budget on whole-period growth rounds
  long min_ladder = 0;             // start the reach ladder at this exponent
  long enumeration_cap = 30000000; // lattice enumeration budget per attempt
};

template <class K>
struct LeafCrossing {
  IntVec2 offset;          // lattice lift: center + t*vS - offset = base + s*vT
  K t;                     // leaf parameter from the probe center
  K s;                     // target-segment parameter
  long ladder = 0;         // least L with |t| < half * lambda_plus^L
  long rounds = 0;         // ceil(ladder / period), growth rounds needed
  long visit_iterate = 0;  // rounds * period: a guaranteed probe return time
};

// A successful leaf expansion: every crossing found at the successful reach,
// sorted by |t| (ties by offset), with one crossing selected.
template <class K>
struct LeafCut {
  Frame<K> mixed;       // columns: probe contracting dir, target dir
  Vec2<K> base;         // target segment base point (plane coordinates)
  K target_slope{};     // target segment direction slope
  std::vector<LeafCrossing<K>> crossings;
  std::size_t selected = 0;
  long ladder = 0;      // reach exponent of the successful enumeration
  K reach{};            // half * lambda_plus^ladder
  bool minimal_ladder = false;  // no crossing existed one reach step earlier
  // Mirror of crossings[selected]:
  IntVec2 offset;
  K t{}, s{};
  long rounds = 0;
  long visit_iterate = 0;
  Vec2<K> point;        // base + s * (1, target_slope), not reduced

  void select(std::size_t i) {
    const LeafCrossing<K>& cr = crossings.at(i);
    selected = i;
    offset = cr.offset;
    t = cr.t;
    s = cr.s;
    rounds = cr.rounds;
    visit_iterate = cr.visit_iterate;
    point = {base.x + s, base.y + s * target_slope};
  }
};

// Grow the leaf through the probe center in whole periods until some lift
// crosses the open target segment {base + s*(1,target_slope) : s in window};
// report every crossing within the successful reach.  The reach climbs one
// eigenvalue factor at a time, so the first successful exponent is minimal
// up to the strictness of the |t| < reach test.
template <class K>
LeafCut<K> expand_leaf_until_cut(const DenseProbe& p, const FieldTag& tag,
                                 const Vec2<K>& base, const K& target_slope,
                                 const KInterval<K>& target_window,
                                 const LeafCutOptions& opt = {}) {
  if (target_window.empty())
    throw std::invalid_argument("target window is empty");
  if (p.period <= 0) throw std::invalid_argument("probe has no period");
  const K slope_probe = promote_quad<K>(p.aut.work.slope_minus, tag);
  if (slope_probe == target_slope)
    throw TransversalityViolated("probe contracting direction is parallel to the target segment");
  const Frame<K> mixed = Frame<K>::from_slopes(slope_probe, target_slope);
  const Vec2<K> q = base - Vec2<K>{K(p.center.x), K(p.center.y)};
  const K lp = promote_quad<K>(p.aut.work.lambda_plus, tag);
  const K half_k{p.half};
  // Mixed-frame coordinates of q + k are (t, -s).
  const KInterval<K> s_hull =
      KInterval<K>::closed(-target_window.hi, -target_window.lo);

  long ladder = opt.min_ladder;
  K reach = half_k * lp.pow(static_cast<unsigned>(ladder));
  while (true) {
    const long rounds_needed = (ladder + p.period - 1) / p.period;
    if (rounds_needed > opt.max_rounds)
      throw IterationBudgetExceeded(
          "no crossing within " + std::to_string(opt.max_rounds) +
          " growth rounds; achieved reach exponent " + std::to_string(ladder - 1));
    std::vector<IntVec2> ks;
    try {
      ks = lattice_candidates(mixed, q, KInterval<K>::closed(-reach, reach), s_hull,
                              opt.enumeration_cap);
    } catch (const std::length_error&) {
      throw IterationBudgetExceeded(
          "crossing enumeration exceeds the configured budget at reach exponent " +
          std::to_string(ladder));
    }
    std::vector<LeafCrossing<K>> found;
    for (const IntVec2& k : ks) {
      const Vec2<K> mc = mixed.to_frame(q + detail::lattice_lift<K>(k));
      const K t = mc.x;
      const K s = -mc.y;
      if (!(abs_of(t) < reach)) continue;
      if (!target_window.contains(s)) continue;
      LeafCrossing<K> cr;
      cr.offset = k;
      cr.t = t;
      cr.s = s;
      cr.ladder = opt.min_ladder;
      K r = half_k * lp.pow(static_cast<unsigned>(opt.min_ladder));
      while (!(abs_of(cr.t) < r)) {
        r = r * lp;
        ++cr.ladder;
      }
      cr.rounds = (cr.ladder + p.period - 1) / p.period;
      cr.visit_iterate = cr.rounds * p.period;
      found.push_back(std::move(cr));
    }
    if (!found.empty()) {
      std::sort(found.begin(), found.end(),
                [](const LeafCrossing<K>& x, const LeafCrossing<K>& y) {
                  const K ax = abs_of(x.t), ay = abs_of(y.t);
                  if (ax < ay) return true;
                  if (ay < ax) return false;
                  if (x.offset.x != y.offset.x) return x.offset.x < y.offset.x;
                  return x.offset.y < y.offset.y;
                });
      LeafCut<K> out;
      out.mixed = mixed;
      out.base = base;
      out.target_slope = target_slope;
      out.crossings = std::move(found);
      out.ladder = ladder;
      out.reach = reach;
      out.minimal_ladder =
          ladder == opt.min_ladder || !(abs_of(out.crossings.front().t) * lp < reach);
      out.select(0);
      return out;
    }
    ++ladder;
    reach = reach * lp;
  }
}

// ---------------------------------------------------------------------------
// First probe entries of an orbit.

// Generic exact walk: first iterate (up to the horizon, inclusive) at which
// the forward orbit of x0 under the positivized map enters each probe square;
// -1 where the probe is never entered.
template <class K>
std::vector<long> first_probe_visits(const Vec2<K>& x0, const PositivizedAuto& S,
                                     const FieldTag& tag,
                                     const std::vector<DenseProbe>& probes,
                                     long horizon) {
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  const Frame<K> fS = eigenframe<K>(S.work, tag);
  std::vector<FrameRect<K>> rects;
  rects.reserve(probes.size());
  for (const DenseProbe& p : probes) {
    if (!(p.aut.work.M == S.work.M))
      throw std::invalid_argument("probe was built for a different automorphism");
    rects.push_back(probe_rect(p, fS));
  }
  std::vector<long> first(probes.size(), -1);
  std::size_t seen = 0;
  Vec2<K> x = reduce_mod1_pt(x0);
  for (long j = 0; j <= horizon && seen < probes.size(); ++j) {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      if (first[i] < 0 && rect_witness(fS, rects[i], x).has_value()) {
        first[i] = j;
        ++seen;
      }
    }
    if (j < horizon && seen < probes.size()) x = reduce_mod1_pt(S.work.M.apply(x));
  }
  return first;
}

// Closed-form first entries for a point on the anchor's contracting leaf,
// x = anchor center + t * (1, slope_minus) mod Z^2.  The orbit decomposes as
// S^j x = orbit[j mod period] + t*lambda_minus^j*(1, slope_minus) mod Z^2, so
// after a directly-walked head (until the correction drops below a quarter of
// the smallest probe half-side) each residue class reduces, per lattice lift
// of each orbit point into each probe's expanding strip, to locating the
// geometrically shrinking correction inside a fixed open interval; that takes
// exactly as many comparisons as the correction needs to fall below the
// interval endpoints' magnitudes.
template <class K>
std::vector<long> leaf_first_visits(const DenseProbe& anchor, const K& t,
                                    const FieldTag& tag,
                                    const std::vector<DenseProbe>& probes,
                                    long horizon) {
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  const ToralAuto& W = anchor.aut.work;
  const Frame<K> fS = eigenframe<K>(W, tag);
  const K lm = promote_quad<K>(W.lambda_minus, tag);
  const K slope = promote_quad<K>(W.slope_minus, tag);
  const RatOrbit orb = orbit_of(W.M, anchor.center);
  const long per = orb.period;

  std::vector<Vec2<K>> centers;
  std::vector<K> halves;
  std::vector<FrameRect<K>> rects;
  for (const DenseProbe& p : probes) {
    if (!(p.aut.work.M == W.M))
      throw std::invalid_argument("probe was built for a different automorphism");
    centers.push_back(fS.to_frame(fS.promote_point(p.center)));
    halves.push_back(K(p.half));
    rects.push_back(probe_rect(p, fS));
  }
  std::vector<long> first(probes.size(), -1);
  if (probes.empty()) return first;
  K hmin = halves.front();
  for (const K& h : halves)
    if (h < hmin) hmin = h;
  const K quarter = hmin / K(4);

  // Head: walk directly while the correction still dwarfs the probes.
  long head = 0;
  {
    K delta = abs_of(t);
    while (head <= horizon && !(delta < quarter)) {
      delta = delta * lm;
      ++head;
    }
  }
  std::size_t seen = 0;
  Vec2<K> x = reduce_mod1_pt(
      Vec2<K>{K(anchor.center.x) + t, K(anchor.center.y) + t * slope});
  for (long j = 0; j < head && j <= horizon && seen < probes.size(); ++j) {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      if (first[i] < 0 && rect_witness(fS, rects[i], x).has_value()) {
        first[i] = j;
        ++seen;
      }
    }
    x = reduce_mod1_pt(W.M.apply(x));
  }
  if (seen == probes.size() || head > horizon) return first;

  // Tail: per probe, residue class, and lattice lift, solve for the first
  // class iterate whose correction lands in the open window.
  const K step = lm.pow(static_cast<unsigned>(per));
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (first[i] >= 0) continue;
    long best = -1;
    for (long rho = 0; rho < per; ++rho) {
      long j0 = head + ((rho - head) % per + per) % per;  // first class member >= head
      const Vec2<K> o = fS.promote_point(orb.points[static_cast<std::size_t>(rho)]);
      const KInterval<K> uwin =
          KInterval<K>::open(centers[i].x - halves[i], centers[i].x + halves[i]);
      const KInterval<K> wwin = KInterval<K>::closed(centers[i].y - halves[i] - quarter,
                                                     centers[i].y + halves[i] + quarter);
      for (const IntVec2& k : lattice_candidates(fS, o, uwin, wwin)) {
        const Vec2<K> c = fS.to_frame(o + detail::lattice_lift<K>(k));
        if (!(abs_of(c.x - centers[i].x) < halves[i])) continue;
        const K off = c.y - centers[i].y;
        const K g_lo = -halves[i] - off;
        const K g_hi = halves[i] - off;
        if (!(g_lo < g_hi)) continue;
        K dj = t * lm.pow(static_cast<unsigned>(j0));
        for (long j = j0; j <= horizon && (best < 0 || j < best); j += per) {
          if (g_lo < dj && dj < g_hi) {
            if (best < 0 || j < best) best = j;
            break;
          }
          // Once the correction is below both endpoint magnitudes its side of
          // zero no longer changes, so failing now means failing forever.
          const K alo = abs_of(g_lo), ahi = abs_of(g_hi);
          const K adj = abs_of(dj);
          if ((alo.sign() == 0 || adj < alo) && (ahi.sign() == 0 || adj < ahi)) break;
          dj = dj * step;
        }
      }
    }
    first[i] = best;
  }
  return first;
}

// Independent re-check of one claimed visit through a matrix power.
template <class K>
bool reverify_probe_visit(const Vec2<K>& x0, const DenseProbe& p,
                          const FieldTag& tag, long iterate) {
  if (iterate < 0) return false;
  const Frame<K> fS = eigenframe<K>(p.aut.work, tag);
  const Vec2<K> xj =
      reduce_mod1_pt(p.aut.work.M.pow(static_cast<unsigned>(iterate)).apply(x0));
  return rect_witness(fS, probe_rect(p, fS), xj).has_value();
}

// ---------------------------------------------------------------------------
// Avoidance certificate: the orbit of xi under M stays out of the open box.

struct AvoidanceCertificate {
  long depth = 0;
  bool ok = false;
};

template <class K>
AvoidanceCertificate certify_avoidance(const Vec2<K>& xi0, const BoxB& box,
                                       const IntMat2& M, const FieldTag& tag,
                                       long depth) {
  if (depth < 0) throw std::invalid_argument("avoidance depth must be nonnegative");
  const Frame<K> f = eigenframe<K>(box.aut, tag);
  const FrameRect<K> rect{
      KInterval<K>::open(K(0), promote_quad<K>(box.u_len, tag)),
      KInterval<K>::open(K(0), promote_quad<K>(box.w_len, tag))};
  Vec2<K> xi = reduce_mod1_pt(xi0);
  for (long n = 0; n <= depth; ++n) {
    if (rect_witness(f, rect, xi).has_value()) throw AvoidanceFailed(n);
    if (n < depth) xi = reduce_mod1_pt(M.apply(xi));
  }
  return {depth, true};
}

template <class K>
AvoidanceCertificate certify_avoidance(const Vec2<K>& xi0, const BoxB& box,
                                       const FieldTag& tag, long depth) {
  return certify_avoidance(xi0, box, box.aut.M, tag, depth);
}

// ---------------------------------------------------------------------------
// Density evidence: grid cells visited by the exact forward orbit.

struct DensityReport {
  long grid = 0;
  long horizon = 0;
  long steps_walked = 0;
  long cells_visited = 0;
  long first_full_cover = -1;  // first iterate covering every cell, or -1
  std::vector<std::pair<long, long>> cells;  // sorted distinct visited cells
  std::vector<long> first_seen;              // parallel: first iterate in each cell
};

template <class K>
DensityReport density_evidence(const Vec2<K>& x0, const PositivizedAuto& S,
                               long grid, long horizon) {
  if (grid <= 0) throw std::invalid_argument("grid must be positive");
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  DensityReport rep;
  rep.grid = grid;
  rep.horizon = horizon;
  const long total = grid * grid;
  const K gk{Rational(grid)};
  std::map<std::pair<long, long>, long> cells;
  Vec2<K> x = reduce_mod1_pt(x0);
  for (long j = 0; j <= horizon; ++j) {
    const long cx = static_cast<long>(floor_of(x.x * gk).get_si());
    const long cy = static_cast<long>(floor_of(x.y * gk).get_si());
    cells.emplace(std::pair<long, long>{cx, cy}, j);
    rep.steps_walked = j;
    if (rep.first_full_cover < 0 && static_cast<long>(cells.size()) == total) {
      rep.first_full_cover = j;
      break;
    }
    if (j < horizon) x = reduce_mod1_pt(S.work.M.apply(x));
  }
  rep.cells_visited = static_cast<long>(cells.size());
  for (const auto& [cell, seen] : cells) {
    rep.cells.push_back(cell);
    rep.first_seen.push_back(seen);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Expanding-direction clearance around a verified segment.

struct ClearanceSide {
  bool bounded = false;  // a tube piece lies strictly within the search radius
  QuadExt gap;           // least expanding-coordinate distance (radius if none)
  long tube = -1;        // achieving tube depth
  IntVec2 offset;        // achieving lattice lift
};

struct ClearanceReport {
  Rational search_radius;
  ClearanceSide minus_side, plus_side;
  QuadExt thickening;  // half the smaller gap: a tube-free symmetric margin
};

// Exact least distance, on each side along the expanding coordinate, from the
// segment's line to tube pieces overlapping the segment's parameter interval.
// A side with no piece strictly within the radius reports the radius itself
// and is marked unbounded.
inline ClearanceReport expanding_clearance(const FractalView& view,
                                           const FoundSegment& seg,
                                           const Rational& radius = Rational(1) / 16) {
  if (!(radius > 0)) throw std::invalid_argument("clearance radius must be positive");
  const Frame<QuadExt>& f = view.box.frame;
  const QuadExt r{radius};
  ClearanceReport rep;
  rep.search_radius = radius;
  rep.minus_side.gap = r;
  rep.plus_side.gap = r;
  const Vec2<QuadExt> origin{QuadExt(0), QuadExt(0)};
  for (long n = 0; n <= view.depth; ++n) {
    const FrameRect<QuadExt>& tr = view.tubes[static_cast<std::size_t>(n)];
    const KInterval<QuadExt> du =
        KInterval<QuadExt>::open(tr.u.lo - seg.u0 - r, tr.u.hi - seg.u0 + r);
    const KInterval<QuadExt> dw =
        KInterval<QuadExt>::open(tr.w.lo - seg.w.hi, tr.w.hi - seg.w.lo);
    for (const IntVec2& k : lattice_candidates(f, origin, du, dw)) {
      const Vec2<QuadExt> d = f.lattice_coords(k);
      const KInterval<QuadExt> pu = KInterval<QuadExt>::open(tr.u.lo - d.x, tr.u.hi - d.x);
      const KInterval<QuadExt> pw = KInterval<QuadExt>::open(tr.w.lo - d.y, tr.w.hi - d.y);
      if (pw.intersect(seg.w).empty()) continue;
      if (!(pu.lo < seg.u0 + r) || !(pu.hi > seg.u0 - r)) continue;
      if (!(pu.hi > seg.u0)) {
        const QuadExt g = seg.u0 - pu.hi;
        if (!rep.minus_side.bounded || g < rep.minus_side.gap)
          rep.minus_side = {true, g, n, k};
      } else if (!(pu.lo < seg.u0)) {
        const QuadExt g = pu.lo - seg.u0;
        if (!rep.plus_side.bounded || g < rep.plus_side.gap)
          rep.plus_side = {true, g, n, k};
      } else {
        throw InvariantViolation("segment overlaps an open tube piece");
      }
    }
  }
  const QuadExt smaller = (rep.minus_side.gap < rep.plus_side.gap) ? rep.minus_side.gap
                                                                   : rep.plus_side.gap;
  rep.thickening = smaller / QuadExt(2);
  return rep;
}

// ---------------------------------------------------------------------------
// End-to-end witness construction.

struct WitnessVisit {
  std::size_t probe = 0;
  long iterate = -1;
  bool reverified = false;
};

struct WitnessOptions {
  long view_depth = 10;
  RatVec2 center{};                   // segment search center, base-relative
  Rational radius = Rational(1) / 20; // segment search ball radius
  long avoid_depth = 200;
  long grid = 8;
  long horizon = 5000;
  LeafCutOptions cut{};
  std::size_t max_candidates = 40;    // crossings tried per anchor probe
  long max_expansions = 8;            // extra reach extensions per anchor
  RatVec2 base{};                     // box-map fixed point anchoring the box
};

template <class K>
struct WitnessReport {
  FieldTag tag{};
  PositivizedAuto target;          // positivized probe automorphism
  std::vector<DenseProbe> probes;
  FoundSegment segment;
  RatVec2 base{};
  std::size_t anchor_probe = 0;    // probe whose leaf produced the cut
  std::size_t anchor_candidate = 0;  // index into the cut's crossing list
  LeafCut<K> cut;
  Vec2<K> point;                   // the witness, reduced mod 1
  K s_param{};                     // its segment parameter
  std::vector<WitnessVisit> visits;
  AvoidanceCertificate avoidance;
  DensityReport density;
  ClearanceReport clearance;
};

template <class K>
WitnessReport<K> make_witness(const BoxB& box, const IntMat2& S,
                              const std::vector<DenseProbe>& probes,
                              const WitnessOptions& opt = {}) {
  WitnessReport<K> rep;
  rep.target = positivize(S);
  const PositivizedAuto& SP = rep.target;
  if (!contracting_transversal(box.aut, SP.work))
    throw TransversalityViolated("the two contracting directions coincide");
  const FieldTag tag = compositum(box.aut.D, SP.work.D);
  if constexpr (std::is_same_v<K, QuadExt>) {
    if (!tag.degenerate())
      throw std::invalid_argument("distinct quadratic fields require the biquadratic scalar type");
  } else {
    if (tag.degenerate())
      throw std::invalid_argument("a shared quadratic field requires the quadratic scalar type");
  }
  rep.tag = tag;
  rep.probes = probes;
  rep.base = reduce_mod1(opt.base);
  if (!(apply_mod1(box.aut.M, rep.base) == rep.base))
    throw std::invalid_argument("base point is not fixed by the box automorphism");
  for (const DenseProbe& p : probes)
    if (!(p.aut.work.M == SP.work.M))
      throw std::invalid_argument("probe was built for a different automorphism");

  const FractalView view = make_fractal_view(box, opt.view_depth);
  rep.segment = find_segment(view, opt.center, opt.radius);
  std::string why;
  if (!verify_segment_free(view, rep.segment, &why))
    throw InvariantViolation("segment re-verification failed: " + why);
  rep.clearance = expanding_clearance(view, rep.segment);

  const K u0 = promote_quad<K>(rep.segment.u0, tag);
  const K slope_t = promote_quad<K>(box.aut.slope_minus, tag);
  const K slope_u = promote_quad<K>(box.aut.slope_plus, tag);
  const Vec2<K> base_k{K(rep.base.x), K(rep.base.y)};
  const Vec2<K> seg_base{base_k.x + u0, base_k.y + u0 * slope_u};
  KInterval<K> window{promote_quad<K>(rep.segment.w.lo, tag),
                      promote_quad<K>(rep.segment.w.hi, tag),
                      rep.segment.w.lo_open, rep.segment.w.hi_open};

  if (probes.empty()) {
    const K mid = (window.lo + window.hi) / K(2);
    rep.s_param = mid;
    rep.point = reduce_mod1_pt(Vec2<K>{seg_base.x + mid, seg_base.y + mid * slope_t});
    const Vec2<K> xi{rep.point.x - base_k.x, rep.point.y - base_k.y};
    rep.avoidance = certify_avoidance(xi, box, tag, opt.avoid_depth);
    return rep;
  }

  std::size_t tried_total = 0;
  for (std::size_t ai = 0; ai < probes.size(); ++ai) {
    const DenseProbe& anchor = probes[ai];
    LeafCutOptions copt = opt.cut;
    std::vector<IntVec2> tried;
    for (long ext = 0; ext <= opt.max_expansions && tried.size() < opt.max_candidates;
         ++ext) {
      LeafCut<K> cut;
      try {
        cut = expand_leaf_until_cut(anchor, tag, seg_base, slope_t, window, copt);
      } catch (const IterationBudgetExceeded&) {
        break;
      }
      for (std::size_t ci = 0;
           ci < cut.crossings.size() && tried.size() < opt.max_candidates; ++ci) {
        const IntVec2& off = cut.crossings[ci].offset;
        if (std::find(tried.begin(), tried.end(), off) != tried.end()) continue;
        tried.push_back(off);
        ++tried_total;
        const std::vector<long> firsts =
            leaf_first_visits(anchor, cut.crossings[ci].t, tag, probes, opt.horizon);
        bool all = true;
        for (long v : firsts)
          if (v < 0) all = false;
        if (!all) continue;

        cut.select(ci);
        rep.anchor_probe = ai;
        rep.anchor_candidate = ci;
        rep.cut = cut;
        rep.s_param = cut.s;
        rep.point = reduce_mod1_pt(cut.point);
        for (std::size_t i = 0; i < probes.size(); ++i) {
          WitnessVisit v;
          v.probe = i;
          v.iterate = firsts[i];
          v.reverified = reverify_probe_visit(rep.point, probes[i], tag, firsts[i]);
          if (!v.reverified)
            throw InvariantViolation("claimed probe visit failed re-verification");
          rep.visits.push_back(v);
        }
        const Vec2<K> xi{rep.point.x - base_k.x, rep.point.y - base_k.y};
        rep.avoidance = certify_avoidance(xi, box, tag, opt.avoid_depth);
        rep.density = density_evidence(rep.point, SP, opt.grid, opt.horizon);
        return rep;
      }
      copt.min_ladder = cut.ladder + 1;
    }
  }
  throw IterationBudgetExceeded(
      "no leaf crossing reaches every probe within the horizon (" +
      std::to_string(tried_total) + " crossings tried)");
}

}  // namespace toraldyn
