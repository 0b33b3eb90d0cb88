#pragma once

// Finite-depth avoidance fractal and the contracting-segment finder.
//
// The depth-N fractal is the complement of the tubes 0..N.  Its key
// geometric property: inside any ball around a fractal point there is an
// open segment parallel to the contracting direction that avoids every tube
// up to depth N.  The finder locates one by the following recursion, carried
// out entirely in eigenframe coordinates with exact arithmetic.
//
// The ball is replaced by an inscribed eigen-aligned open window U around
// the center z; the window's u-extent never changes afterwards.  Within U
// every tube appears as a union of "hits": lattice translates of the tube
// rectangle clipped to U.  A hit either spans U's whole u-extent (a "band",
// bounded above/below by expanding-direction boundary faces) or exposes a
// contracting-direction face line inside U (a "crossing").
//
//   Case 1   the first tube meeting U has a crossing: the intersection of U
//            with that face's interior is the desired segment.
//   Case 2   all hits of the first tube M are bands.  The window is first
//            shrunk so exactly one boundary-face level of tube M remains
//            inside (the one nearest the reference level sw); the free half
//            V of the window lies below (Case 2A, floor face kept) or above
//            (Case 2B, ceiling face kept) sw.  Let n be the first tube
//            meeting V.  If tube n has a crossing in U we are back in
//            Case 1.  Otherwise in Case 2A the arriving band lies entirely
//            in the closed lower half and the window's bottom is raised to
//            that band's ceiling level, which preserves the invariant that V
//            is free of all tubes <= n; the first tube meeting the next V is
//            therefore strictly deeper, so the loop terminates.  In Case 2B
//            the configuration is impossible (the arriving band would have
//            to straddle the reference level, contradicting that the center
//            avoids the open tubes), so a crossing must exist.
//
// If no tube at all meets the window (or its free half) within depth N, the
// segment through the center's u-line is already tube-free; this finite-
// truncation outcome is reported as source WindowClear.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toraldyn/tubes.hpp"

namespace toraldyn {

struct CenterNotInFractal : std::runtime_error {
  explicit CenterNotInFractal(const std::string& what) : std::runtime_error(what) {}
};
struct DepthBudgetExceeded : std::runtime_error {
  explicit DepthBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};
struct NoTubeMeetsWindow : std::runtime_error {
  explicit NoTubeMeetsWindow(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// View of the complement of tubes 0..depth.

struct FractalView {
  BoxB box;
  long depth = 0;
  std::vector<FrameRect<QuadExt>> tubes;  // cached open tube rectangles
};

inline FractalView make_fractal_view(const BoxB& box, long depth) {
  if (depth < 0) throw std::invalid_argument("fractal depth must be nonnegative");
  FractalView v;
  v.box = box;
  v.depth = depth;
  v.tubes.reserve(static_cast<size_t>(depth) + 1);
  for (long n = 0; n <= depth; ++n) v.tubes.push_back(make_tube(box, n).rect);
  return v;
}

struct MembershipResult {
  bool in_fractal = false;
  long first_hit_depth = -1;  // least tube depth containing the point, or -1
  IntVec2 witness;            // lattice lift witnessing the hit
};

inline MembershipResult membership(const FractalView& view, const Vec2<QuadExt>& p) {
  for (long n = 0; n <= view.depth; ++n) {
    const auto ks = rect_witnesses(view.box.frame, view.tubes[static_cast<size_t>(n)], p);
    if (!ks.empty()) return {false, n, ks.front()};
  }
  return {true, -1, IntVec2{}};
}

inline MembershipResult membership(const FractalView& view, const RatVec2& p) {
  return membership(view, view.box.frame.promote_point(p));
}

// ---------------------------------------------------------------------------
// Hits of one tube inside a window.

struct TubeWindowHit {
  IntVec2 offset;                   // lattice lift: window point + offset in tube
  Vec2<QuadExt> delta;              // frame coordinates of offset
  KInterval<QuadExt> u_cover;       // open overlap with the window, u direction
  KInterval<QuadExt> w_cover;       // open overlap with the window, w direction
  bool full_u = false;              // band: covers the window's whole u-extent
  bool start_face = false;          // contracting face line u = -du inside window
  bool end_face = false;            // contracting face line u = U_d - du inside
  bool floor_line = false;          // expanding face level -dw inside window
  bool ceil_line = false;           // expanding face level W_d - dw inside window
};

inline std::vector<TubeWindowHit> tube_window_hits(const FractalView& view,
                                                   const FrameRect<QuadExt>& win,
                                                   long depth) {
  const FrameRect<QuadExt>& tr = view.tubes.at(static_cast<size_t>(depth));
  const Frame<QuadExt>& f = view.box.frame;
  const KInterval<QuadExt> du_range =
      KInterval<QuadExt>::open(tr.u.lo - win.u.hi, tr.u.hi - win.u.lo);
  const KInterval<QuadExt> dw_range =
      KInterval<QuadExt>::open(tr.w.lo - win.w.hi, tr.w.hi - win.w.lo);
  const Vec2<QuadExt> origin{QuadExt(0), QuadExt(0)};
  std::vector<TubeWindowHit> out;
  for (const IntVec2& k : lattice_candidates(f, origin, du_range, dw_range)) {
    const Vec2<QuadExt> d = f.lattice_coords(k);
    TubeWindowHit h;
    h.offset = k;
    h.delta = d;
    const KInterval<QuadExt> band_u = KInterval<QuadExt>::open(tr.u.lo - d.x, tr.u.hi - d.x);
    const KInterval<QuadExt> band_w = KInterval<QuadExt>::open(tr.w.lo - d.y, tr.w.hi - d.y);
    h.u_cover = win.u.intersect(band_u);
    h.w_cover = win.w.intersect(band_w);
    if (h.u_cover.empty() || h.w_cover.empty()) continue;
    h.full_u = !(band_u.lo > win.u.lo) && !(band_u.hi < win.u.hi);
    h.start_face = win.u.contains(band_u.lo);
    h.end_face = win.u.contains(band_u.hi);
    h.floor_line = win.w.contains(band_w.lo);
    h.ceil_line = win.w.contains(band_w.hi);
    out.push_back(std::move(h));
  }
  return out;
}

struct FirstMeeting {
  long depth = -1;
  std::vector<TubeWindowHit> hits;
};

// Least tube depth in [from_depth, view.depth] meeting the open window.
inline FirstMeeting first_meeting_tube(const FractalView& view,
                                       const FrameRect<QuadExt>& win,
                                       long from_depth = 0) {
  for (long n = from_depth; n <= view.depth; ++n) {
    auto hits = tube_window_hits(view, win, n);
    if (!hits.empty()) return {n, std::move(hits)};
  }
  throw NoTubeMeetsWindow("no tube up to depth " + std::to_string(view.depth) +
                          " meets the window");
}

// ---------------------------------------------------------------------------
// Segment finder.

enum class SegmentSource { StartFace, EndFace, WindowClear };

inline const char* to_string(SegmentSource s) {
  switch (s) {
    case SegmentSource::StartFace: return "start-face";
    case SegmentSource::EndFace: return "end-face";
    case SegmentSource::WindowClear: return "window-clear";
  }
  return "?";
}

// One record per event.  Each loop iteration that classifies Case 2 logs
// {first tube, 'A' or 'B', arriving tube or -1}; the final exit logs
// {first tube, '1' or 'F', arriving tube or -1}, where '1' is a contracting
// face exit and 'F' a tube-free window (or free half) exit.
struct SegmentStep {
  long first_tube = -1;
  char case_tag = '?';
  long next_tube = -1;
};

struct FoundSegment {
  QuadExt u0;               // frame u-coordinate of the contracting line
  KInterval<QuadExt> w;     // open interval along the contracting coordinate
  long certified_depth = 0;
  SegmentSource source = SegmentSource::WindowClear;
  long source_tube = -1;    // tube whose contracting face carries the segment
  IntVec2 source_offset;
  bool trimmed = false;     // whether re-verification removed any sub-interval
  std::vector<SegmentStep> steps;
  FrameRect<QuadExt> window;  // final search window
  RatVec2 center;
  Rational radius;
};

namespace detail {

// Remove the open pieces of every tube from the open candidate interval and
// return the longest remaining open sub-interval (lowest wins ties), plus a
// flag telling whether anything was removed.
inline std::pair<KInterval<QuadExt>, bool> trim_free_interval(
    const FractalView& view, const QuadExt& u0, KInterval<QuadExt> cand) {
  std::vector<KInterval<QuadExt>> parts{cand};
  bool removed = false;
  for (long n = 0; n <= view.depth; ++n) {
    const FrameSegment<QuadExt> seg{u0, KInterval<QuadExt>::closed(cand.lo, cand.hi)};
    for (const auto& piece :
         segment_rect_pieces(view.box.frame, seg, view.tubes[static_cast<size_t>(n)])) {
      std::vector<KInterval<QuadExt>> next;
      for (const KInterval<QuadExt>& part : parts) {
        const KInterval<QuadExt> cut = part.intersect(piece.w);
        if (cut.empty()) {
          next.push_back(part);
          continue;
        }
        removed = true;
        const KInterval<QuadExt> left = KInterval<QuadExt>::open(part.lo, cut.lo);
        const KInterval<QuadExt> right = KInterval<QuadExt>::open(cut.hi, part.hi);
        if (!left.empty()) next.push_back(left);
        if (!right.empty()) next.push_back(right);
      }
      parts = std::move(next);
    }
  }
  KInterval<QuadExt> best = KInterval<QuadExt>::open(QuadExt(0), QuadExt(0));
  for (const KInterval<QuadExt>& part : parts)
    if (best.empty() || best.width() < part.width()) best = part;
  return {best, removed};
}

// Largest ball-inscribed eigen-aligned half-side obtained by halving: starts
// at the radius and halves until the four window corners are certified inside
// the ball and the window diameter is at most an eighth of the contracting
// face length.  The exact optimum is irrational; factor-two suboptimality is
// acceptable because only inscribedness is certified.
inline Rational window_half_side(const BoxB& box, const Rational& radius) {
  const QuadExt& s0 = box.frame.s0;
  const QuadExt& s1 = box.frame.s1;
  const QuadExt nm_sum = QuadExt(4) + (s0 + s1) * (s0 + s1);  // |v+ + v-|^2
  const QuadExt nm_dif = (s0 - s1) * (s0 - s1);               // |v+ - v-|^2
  const QuadExt nm_max = (nm_sum < nm_dif) ? nm_dif : nm_sum;
  const QuadExt r2 = QuadExt(radius) * QuadExt(radius);
  const QuadExt face2 = box.w_len * box.w_len * (QuadExt(1) + s1 * s1);
  QuadExt bound = r2 / nm_max;
  const QuadExt cap = face2 / (QuadExt(256) * nm_max);
  if (cap < bound) bound = cap;
  Rational a = radius;
  while (QuadExt(a) * QuadExt(a) > bound) a /= 2;
  return a;
}

}  // namespace detail

// Locate an open contracting-direction segment inside the ball around the
// center that avoids every tube up to the view's depth.
inline FoundSegment find_segment(const FractalView& view, const RatVec2& center,
                                 const Rational& radius) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  const Frame<QuadExt>& f = view.box.frame;
  const MembershipResult mem = membership(view, center);
  if (!mem.in_fractal)
    throw CenterNotInFractal("center lies in tube " + std::to_string(mem.first_hit_depth));

  const Vec2<QuadExt> z = f.to_frame(f.promote_point(center));
  const Rational a = detail::window_half_side(view.box, radius);
  FrameRect<QuadExt> win{KInterval<QuadExt>::open(z.x - QuadExt(a), z.x + QuadExt(a)),
                         KInterval<QuadExt>::open(z.y - QuadExt(a), z.y + QuadExt(a))};
  const QuadExt sw = z.y;  // reference slice level, fixed for the whole search

  FoundSegment out;
  out.certified_depth = view.depth;
  out.center = center;
  out.radius = radius;

  auto finish = [&](const QuadExt& u0, const KInterval<QuadExt>& cand,
                    SegmentSource source, long source_tube, const IntVec2& offset,
                    char tag, long first_tube, long next_tube) {
    out.steps.push_back({first_tube, tag, next_tube});
    auto [seg, removed] = detail::trim_free_interval(view, u0, cand);
    if (seg.empty())
      throw InvariantViolation("candidate segment vanished under re-verification");
    out.u0 = u0;
    out.w = seg;
    out.source = source;
    out.source_tube = source_tube;
    out.source_offset = offset;
    out.trimmed = removed;
    out.window = win;
    return out;
  };

  long last_arrival = -1;  // arriving-tube depths must strictly increase
  const long step_budget = view.depth + 2;
  for (long step = 0; step <= step_budget; ++step) {
    if (!win.w.contains(sw))
      throw InvariantViolation("reference slice fell outside the window");

    FirstMeeting fm;
    try {
      fm = first_meeting_tube(view, win);
    } catch (const NoTubeMeetsWindow&) {
      return finish(z.x, win.w, SegmentSource::WindowClear, -1, IntVec2{}, 'F', -1, -1);
    }
    const long M = fm.depth;

    // Case 1 directly at the first tube: pick the crossing nearest the
    // center's u-line (ties: start face first, then lexicographic offset).
    const TubeWindowHit* cross = nullptr;
    QuadExt cross_u0;
    bool cross_start = true;
    auto consider = [&](const TubeWindowHit& h, bool start) {
      const QuadExt u0 = start ? -h.delta.x
                               : view.tubes[static_cast<size_t>(M)].u.hi - h.delta.x;
      const QuadExt dist = (u0 < z.x) ? z.x - u0 : u0 - z.x;
      if (cross != nullptr) {
        const QuadExt best = (cross_u0 < z.x) ? z.x - cross_u0 : cross_u0 - z.x;
        if (best < dist) return;
        if (!(dist < best) && !start) return;
      }
      cross = &h;
      cross_u0 = u0;
      cross_start = start;
    };
    for (const TubeWindowHit& h : fm.hits) {
      if (h.start_face) consider(h, true);
      if (h.end_face) consider(h, false);
    }
    if (cross != nullptr) {
      const KInterval<QuadExt> cand = win.w.intersect(
          KInterval<QuadExt>::open(-cross->delta.y,
                                   view.tubes[static_cast<size_t>(M)].w.hi - cross->delta.y));
      if (cand.empty())
        throw InvariantViolation("crossing face has empty interior overlap");
      return finish(cross_u0, cand,
                    cross_start ? SegmentSource::StartFace : SegmentSource::EndFace,
                    M, cross->offset, '1', M, -1);
    }

    // Case 2: every hit of tube M is a band.  Collect its boundary-face
    // levels strictly inside the window and shrink so exactly one remains:
    // the level nearest the reference slice (ties prefer the floor above).
    std::vector<std::pair<QuadExt, bool>> lines;  // (level, is_floor)
    for (const TubeWindowHit& h : fm.hits) {
      if (!h.full_u)
        throw InvariantViolation("partial hit without a contracting face line");
      if (h.w_cover.contains(sw))
        throw InvariantViolation("window center lies inside the first tube");
      if (h.floor_line) lines.push_back({-h.delta.y, true});
      if (h.ceil_line)
        lines.push_back({view.tubes[static_cast<size_t>(M)].w.hi - h.delta.y, false});
    }
    if (lines.empty())
      throw InvariantViolation("first tube meets the window without exposing a face");
    auto closer = [&](const std::pair<QuadExt, bool>& p, const std::pair<QuadExt, bool>& q) {
      const QuadExt dp = (p.first < sw) ? sw - p.first : p.first - sw;
      const QuadExt dq = (q.first < sw) ? sw - q.first : q.first - sw;
      if (dp < dq) return true;
      if (dq < dp) return false;
      return p.second && !q.second;  // prefer the floor face on exact ties
    };
    std::pair<QuadExt, bool> target = lines.front();
    for (const auto& ln : lines)
      if (closer(ln, target)) target = ln;
    QuadExt lo = win.w.lo, hi = win.w.hi;
    const QuadExt lo_ref = (target.first < sw) ? target.first : sw;
    const QuadExt hi_ref = (sw < target.first) ? target.first : sw;
    for (const auto& ln : lines) {
      if (ln.first < lo_ref && lo < ln.first) lo = ln.first;
      if (hi_ref < ln.first && ln.first < hi) hi = ln.first;
    }
    win.w = KInterval<QuadExt>::open(lo, hi);

    const bool case_2a = target.second;  // floor face kept => free half below
    const KInterval<QuadExt> v_half = case_2a
                                          ? KInterval<QuadExt>::open(win.w.lo, sw)
                                          : KInterval<QuadExt>::open(sw, win.w.hi);
    const FrameRect<QuadExt> v_rect{win.u, v_half};

    FirstMeeting arrival;
    try {
      arrival = first_meeting_tube(view, v_rect);
    } catch (const NoTubeMeetsWindow&) {
      out.steps.push_back({M, case_2a ? 'A' : 'B', -1});
      return finish(z.x, v_half, SegmentSource::WindowClear, -1, IntVec2{}, 'F', M, -1);
    }
    const long n = arrival.depth;
    if (n <= M) throw InvariantViolation("arriving tube is not deeper than the first");
    if (n <= last_arrival)
      throw InvariantViolation("arriving tube depths failed to increase");
    last_arrival = n;
    out.steps.push_back({M, case_2a ? 'A' : 'B', n});

    // Exit to Case 1 if the arriving tube exposes a contracting face in the
    // full window.
    const auto n_hits = tube_window_hits(view, win, n);
    const TubeWindowHit* exit_cross = nullptr;
    QuadExt exit_u0;
    bool exit_start = true;
    for (const TubeWindowHit& h : n_hits) {
      auto consider_exit = [&](bool start) {
        const QuadExt u0 = start ? -h.delta.x
                                 : view.tubes[static_cast<size_t>(n)].u.hi - h.delta.x;
        const QuadExt dist = (u0 < z.x) ? z.x - u0 : u0 - z.x;
        if (exit_cross != nullptr) {
          const QuadExt best = (exit_u0 < z.x) ? z.x - exit_u0 : exit_u0 - z.x;
          if (best < dist) return;
          if (!(dist < best) && !start) return;
        }
        exit_cross = &h;
        exit_u0 = u0;
        exit_start = start;
      };
      if (h.start_face) consider_exit(true);
      if (h.end_face) consider_exit(false);
    }
    if (exit_cross != nullptr) {
      const KInterval<QuadExt> cand = win.w.intersect(
          KInterval<QuadExt>::open(-exit_cross->delta.y,
                                   view.tubes[static_cast<size_t>(n)].w.hi -
                                       exit_cross->delta.y));
      if (cand.empty())
        throw InvariantViolation("arriving face has empty interior overlap");
      return finish(exit_u0, cand,
                    exit_start ? SegmentSource::StartFace : SegmentSource::EndFace,
                    n, exit_cross->offset, '1', M, n);
    }

    if (!case_2a)
      throw InvariantViolation(
          "upper-half arrival without a contracting face is impossible");

    // Case 2A shrink: the arriving bands lie in the closed lower half; raise
    // the window's bottom to the highest ceiling level among them.  The new
    // free half is contained in the old one and avoids tubes up to n.
    bool have_ceiling = false;
    QuadExt ceiling;
    for (const TubeWindowHit& h : arrival.hits) {
      if (!h.full_u)
        throw InvariantViolation("arriving band exposes an unreported face line");
      const QuadExt level = view.tubes[static_cast<size_t>(n)].w.hi - h.delta.y;
      if (sw < level)
        throw InvariantViolation("arriving band reaches above the reference slice");
      if (!have_ceiling || ceiling < level) {
        ceiling = level;
        have_ceiling = true;
      }
    }
    if (!have_ceiling || !(win.w.lo < ceiling))
      throw InvariantViolation("arriving band has no ceiling inside the window");
    if (ceiling == sw)
      throw InvariantViolation("reference slice lies on a tube boundary slice");
    win.w = KInterval<QuadExt>::open(ceiling, win.w.hi);
  }
  throw DepthBudgetExceeded("no contracting face found within the depth budget");
}

// Independent re-verification: the segment is open and nonempty, lies inside
// the stated ball, and misses every tube up to the certified depth.
inline bool verify_segment_free(const FractalView& view, const FoundSegment& seg,
                                std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  if (seg.w.empty() || !seg.w.lo_open || !seg.w.hi_open)
    return fail("segment interval is empty or not open");
  if (seg.certified_depth != view.depth)
    return fail("view depth does not match the certified depth");
  const Frame<QuadExt>& f = view.box.frame;
  const Vec2<QuadExt> z = f.to_frame(f.promote_point(seg.center));
  const QuadExt r2 = QuadExt(seg.radius) * QuadExt(seg.radius);
  for (const QuadExt& end : {seg.w.lo, seg.w.hi}) {
    const Vec2<QuadExt> p = f.from_frame({seg.u0 - z.x, end - z.y});
    if (r2 < p.x * p.x + p.y * p.y) return fail("segment endpoint leaves the ball");
  }
  const FrameSegment<QuadExt> fs{seg.u0, seg.w};
  for (long n = 0; n <= view.depth; ++n) {
    if (!segment_rect_pieces(f, fs, view.tubes[static_cast<size_t>(n)]).empty())
      return fail("segment meets tube " + std::to_string(n));
  }
  if (why != nullptr) why->clear();
  return true;
}

}  // namespace toraldyn
