#pragma once

// Exact geometry of frame-aligned regions on the torus.
//
// Regions are rectangles (or vertical segments) in the coordinates of a
// fixed frame, with per-face openness flags.  Their images on the torus are
// unions of lattice translates; every torus-level query reduces to an exact
// enumeration of the integer vectors k whose frame coordinates land in a
// bounded window.  Enumeration exploits u + w = x: scanning the first
// integer coordinate slices the window into short exactly-computable runs,
// and every emitted candidate is re-checked by direct membership, so the
// bracketing arithmetic only needs to be complete, not tight.

#include <utility>
#include <vector>

#include "toraldyn/frame.hpp"

namespace toraldyn {

template <class K>
Integer ceil_of(const K& x) { return -floor_of(-x); }

template <class K>
struct KInterval {
  K lo, hi;
  bool lo_open = false, hi_open = false;

  static KInterval open(const K& lo, const K& hi) { return {lo, hi, true, true}; }
  static KInterval closed(const K& lo, const K& hi) { return {lo, hi, false, false}; }

  bool empty() const {
    if (lo > hi) return true;
    return lo == hi && (lo_open || hi_open);
  }
  bool contains(const K& x) const {
    if (lo_open ? !(x > lo) : !(x >= lo)) return false;
    if (hi_open ? !(x < hi) : !(x <= hi)) return false;
    return true;
  }
  K width() const { return hi - lo; }
  KInterval translated(const K& d) const { return {lo + d, hi + d, lo_open, hi_open}; }

  KInterval intersect(const KInterval& o) const {
    KInterval r = *this;
    if (o.lo > r.lo) { r.lo = o.lo; r.lo_open = o.lo_open; }
    else if (o.lo == r.lo) r.lo_open = r.lo_open || o.lo_open;
    if (o.hi < r.hi) { r.hi = o.hi; r.hi_open = o.hi_open; }
    else if (o.hi == r.hi) r.hi_open = r.hi_open || o.hi_open;
    return r;
  }
};

template <class K>
struct FrameRect {
  KInterval<K> u, w;
  bool contains(const Vec2<K>& c) const { return u.contains(c.x) && w.contains(c.y); }
};

// Vertical segment {u = u0} x w in frame coordinates.
template <class K>
struct FrameSegment {
  K u0;
  KInterval<K> w;
};

// All k in Z^2 whose offset frame coordinates satisfy
// to_frame(p + k) in [u.lo, u.hi] x [w.lo, w.hi] (closed hulls; openness is
// the caller's concern).  Cost is linear in u-width + w-width.
template <class K>
std::vector<IntVec2> lattice_candidates(const Frame<K>& f, const Vec2<K>& p,
                                        const KInterval<K>& u, const KInterval<K>& w,
                                        long enumeration_cap = 1000000) {
  std::vector<IntVec2> out;
  if (u.lo > u.hi || w.lo > w.hi) return out;
  // x + k1 = u + w constrains k1 to an integer range.
  const Integer k1_lo = ceil_of(u.lo + w.lo - p.x);
  const Integer k1_hi = floor_of(u.hi + w.hi - p.x);
  if (k1_hi < k1_lo) return out;
  if (k1_hi - k1_lo > enumeration_cap)
    throw std::length_error("lattice enumeration range too large");
  const K slope_gap = f.s0 - f.s1;
  for (Integer k1 = k1_lo; k1 <= k1_hi; ++k1) {
    // On this slice u + w = sigma is fixed; u ranges over a short interval
    // and y + k2 = s1*sigma + (s0 - s1)*u is affine in u.
    const K sigma = p.x + K(Rational(k1));
    K ju_lo = u.lo, ju_hi = u.hi;
    const K ju_lo2 = sigma - w.hi, ju_hi2 = sigma - w.lo;
    if (ju_lo2 > ju_lo) ju_lo = ju_lo2;
    if (ju_hi2 < ju_hi) ju_hi = ju_hi2;
    if (ju_lo > ju_hi) continue;
    const K base = f.s1 * sigma;
    const K e0 = base + slope_gap * ju_lo;
    const K e1 = base + slope_gap * ju_hi;
    const K& ylo = (e0 <= e1) ? e0 : e1;
    const K& yhi = (e0 <= e1) ? e1 : e0;
    const Integer k2_lo = ceil_of(ylo - p.y);
    const Integer k2_hi = floor_of(yhi - p.y);
    if (k2_hi - k2_lo > enumeration_cap)
      throw std::length_error("lattice enumeration range too large");
    for (Integer k2 = k2_lo; k2 <= k2_hi; ++k2) {
      const IntVec2 k{k1, k2};
      const Vec2<K> c = f.to_frame(p + Vec2<K>{K(Rational(k1)), K(Rational(k2))});
      if (c.x >= u.lo && c.x <= u.hi && c.y >= w.lo && c.y <= w.hi) out.push_back(k);
    }
  }
  return out;
}

// Lattice witnesses for membership of the torus point p (mod Z^2) in the
// projected rectangle, honouring openness.
template <class K>
std::vector<IntVec2> rect_witnesses(const Frame<K>& f, const FrameRect<K>& r,
                                    const Vec2<K>& p) {
  std::vector<IntVec2> out;
  for (const IntVec2& k : lattice_candidates(f, p, r.u, r.w)) {
    const Vec2<K> c = f.to_frame(p + Vec2<K>{K(Rational(k.x)), K(Rational(k.y))});
    if (r.contains(c)) out.push_back(k);
  }
  return out;
}

template <class K>
std::optional<IntVec2> rect_witness(const Frame<K>& f, const FrameRect<K>& r,
                                    const Vec2<K>& p) {
  auto all = rect_witnesses(f, r, p);
  if (all.empty()) return std::nullopt;
  return all.front();
}

// Pieces of the projected segment that land inside the projected rectangle:
// for each lattice offset k with a nonempty overlap, the sub-interval of the
// segment's own w-parameter that falls in r after translation by k.
template <class K>
struct SegmentPiece {
  IntVec2 k;            // lattice offset applied to the segment
  KInterval<K> w;       // sub-interval of the segment parameter
};

template <class K>
std::vector<SegmentPiece<K>> segment_rect_pieces(const Frame<K>& f,
                                                 const FrameSegment<K>& s,
                                                 const FrameRect<K>& r) {
  std::vector<SegmentPiece<K>> out;
  if (s.w.empty() || r.u.empty() || r.w.empty()) return out;
  const KInterval<K> ku = KInterval<K>::closed(r.u.lo - s.u0, r.u.hi - s.u0);
  const KInterval<K> kw = KInterval<K>::closed(r.w.lo - s.w.hi, r.w.hi - s.w.lo);
  const Vec2<K> zero{K(0), K(0)};
  for (const IntVec2& k : lattice_candidates(f, zero, ku, kw)) {
    const Vec2<K> kc = f.lattice_coords(k);
    if (!r.u.contains(s.u0 + kc.x)) continue;
    const KInterval<K> piece = s.w.intersect(
        KInterval<K>{r.w.lo - kc.y, r.w.hi - kc.y, r.w.lo_open, r.w.hi_open});
    if (!piece.empty()) out.push_back({k, piece});
  }
  return out;
}

// Expanding-direction slice of a projected rectangle through a point: for
// each witnessing lift, the horizontal segment {w = w(z+k)} x full u-extent.
// Because the region is frame-aligned, the connected component through the
// point is always the whole u-extent translated to the point's w-level.
template <class K>
struct Slice {
  IntVec2 k;          // witnessing lift of the point
  K w;                // contracting coordinate of the slice
  KInterval<K> u;     // equal to the rectangle's u-extent
};

template <class K>
std::vector<Slice<K>> slices_through(const Frame<K>& f, const FrameRect<K>& r,
                                     const Vec2<K>& z) {
  std::vector<Slice<K>> out;
  for (const IntVec2& k : rect_witnesses(f, r, z)) {
    const Vec2<K> c = f.to_frame(z + Vec2<K>{K(Rational(k.x)), K(Rational(k.y))});
    out.push_back({k, c.y, r.u});
  }
  return out;
}

// The unique lattice vector k with to_frame(p + k) = c, if one exists.
template <class K>
std::optional<IntVec2> lattice_solve(const Frame<K>& f, const Vec2<K>& p,
                                     const Vec2<K>& c) {
  const Vec2<K> q = f.from_frame(c);
  const auto k1 = integer_value<K>(q.x - p.x);
  if (!k1) return std::nullopt;
  const auto k2 = integer_value<K>(q.y - p.y);
  if (!k2) return std::nullopt;
  return IntVec2{*k1, *k2};
}

}  // namespace toraldyn
