#pragma once

// Construction of the avoided box B.
//
// Inputs: a hyperbolic matrix (positivized so both eigenvalues are > 0), a
// rational periodic point y0, and an ambient box Bp with one vertex at the
// origin and frame extents (0, u_max) x (0, w_max).  For each orbit point
// y_n, the contracting segment through y_n first touches the closed
// expanding edge Ep = [0, u_max] x {0} at radius alpha_n; the minimal
// radius over the orbit picks an approach piece, and B is the open box
// (0, u_sel) x (0, h) whose far contracting face lies on that approach
// segment.  The contracting height h is shrunk until B provably avoids the
// radius-alpha* contracting segment through every orbit point, with every
// avoidance recorded as an exact inequality.  Four branches arise: the
// minimal index can be unique or tied, and the approach can enter the open
// ambient box from above (offset +alpha) or only touch its edge from below
// (offset -alpha), in which case the radius is enlarged by an exact
// midpoint perturbation eta before the box is cut.
//
// All decisions are deterministic functions of the inputs; the emitted
// certificate stores every enumeration window, candidate piece, and
// inequality so that verification replays arithmetic without re-deriving
// any choice.

#include <string>
#include <utility>
#include <vector>

#include "toraldyn/geometry.hpp"

namespace toraldyn {

class SearchBudgetExceeded : public std::runtime_error {
 public:
  explicit SearchBudgetExceeded(const std::string& w) : std::runtime_error(w) {}
};
class DegenerateOrbit : public std::runtime_error {
 public:
  explicit DegenerateOrbit(const std::string& w) : std::runtime_error(w) {}
};
class PerturbationFailed : public std::runtime_error {
 public:
  explicit PerturbationFailed(const std::string& w) : std::runtime_error(w) {}
};

// One crossing of a contracting line E^-(y_n) + k through the vertical
// strip 0 <= u <= u_max: u0 is the crossing's expanding coordinate and c
// its signed contracting offset (the crossing touches the expanding edge
// at radius |c|).
struct PieceRecord {
  long n = 0;
  IntVec2 k;
  QuadExt u0, c;
};

// Per-orbit-point first-approach record: alpha = min |c| over all pieces,
// certified complete by the enumeration window (any piece outside the
// window has |c| > window >= alpha).
struct AlphaRecord {
  long n = 0;
  QuadExt alpha;
  Rational window;
  PieceRecord hit;                 // canonical achieving piece (positive side on a tie)
  std::vector<PieceRecord> pieces; // all pieces found within the window
};

enum class AvoidVerdict {
  SelectedFace,   // the chosen approach piece: carries the far face of B
  OutsideStrip,   // u0 >= u_sel, so the piece cannot reach the open strip
  Below,          // c + alpha* <= 0: segment stays in the closed lower half
  Above,          // c - alpha* >= h: segment stays above the box
};

struct BoxCertificate {
  // Inputs.
  IntMat2 matrix;        // original matrix before positivization
  int exponent = 1;      // 1 or 2; the construction runs on matrix^exponent
  RatVec2 y0;
  Rational u_max, w_max, bx_cap;
  bool y0_interior = false;  // whether y0 lies inside the open ambient box (recorded only)

  std::vector<RatVec2> orbit;
  std::vector<AlphaRecord> alphas;

  QuadExt alpha_min;                  // minimal alpha_n over the orbit
  std::vector<PieceRecord> retained;  // all pieces with |c| <= alpha_min + w_max
  std::vector<size_t> argmin_ids;     // retained indices with |c| = alpha_min

  bool unique_min_index = false;  // exactly one orbit index achieves alpha_min
  bool approach_enters = false;   // some minimal piece enters the open ambient box
  QuadExt eta;                    // perturbation (zero when approach_enters)
  QuadExt alpha_star;             // alpha_min + eta

  size_t selected_id = 0;  // retained index of the chosen approach piece
  QuadExt u_sel, h;        // final box extents: B = (0,u_sel) x (0,h), open

  std::vector<AvoidVerdict> verdicts;  // parallel to retained
};

struct BoxB {
  ToralAuto aut;          // positivized automorphism the box is built for
  int exponent = 1;
  Frame<QuadExt> frame;   // its eigenframe
  QuadExt u_len, w_len;   // extents of the open box (0,u_len) x (0,w_len)
  QuadExt alpha_star;
  long m_sel = 0;         // orbit index of the selected approach piece
  std::vector<RatVec2> orbit;

  FrameRect<QuadExt> rect() const {
    return {KInterval<QuadExt>::open(QuadExt(0), u_len),
            KInterval<QuadExt>::open(QuadExt(0), w_len)};
  }
  // Frame extents of the n-th inverse-iterate tube: the expanding edge
  // contracts by lambda_minus per step and the contracting edge stretches
  // by lambda_plus.
  FrameRect<QuadExt> tube_rect(long n) const {
    return {KInterval<QuadExt>::open(QuadExt(0), u_len * aut.lambda_minus.pow(static_cast<unsigned>(n))),
            KInterval<QuadExt>::open(QuadExt(0), w_len * aut.lambda_plus.pow(static_cast<unsigned>(n)))};
  }
  // The radius-alpha* contracting segment through orbit point n, as a
  // frame segment (its torus image is handled by lattice enumeration).
  FrameSegment<QuadExt> approach_segment(long n) const {
    const Vec2<QuadExt> c = frame.to_frame(frame.promote_point(orbit[static_cast<size_t>(n)]));
    return {c.x, KInterval<QuadExt>::closed(c.y - alpha_star, c.y + alpha_star)};
  }
};

// First touch of the contracting segment through yn against the closed
// expanding edge [0, u_max] x {0}: doubling window search, exact minimum.
inline AlphaRecord compute_alpha(long n, const RatVec2& yn, const Frame<QuadExt>& f,
                                 const Rational& u_max, const Rational& w_max,
                                 int max_doublings = 48) {
  const Vec2<QuadExt> p = f.promote_point(yn);
  const KInterval<QuadExt> strip = KInterval<QuadExt>::closed(QuadExt(0), QuadExt(u_max));
  Rational window = w_max;
  for (int round = 0; round <= max_doublings; ++round, window *= 2) {
    const auto ks = lattice_candidates(f, p, strip,
                                       KInterval<QuadExt>::closed(QuadExt(-window), QuadExt(window)));
    if (ks.empty()) continue;
    AlphaRecord rec;
    rec.n = n;
    rec.window = window;
    for (const IntVec2& k : ks) {
      const Vec2<QuadExt> c = f.to_frame(p + Vec2<QuadExt>{QuadExt(Rational(k.x)), QuadExt(Rational(k.y))});
      rec.pieces.push_back({n, k, c.x, c.y});
    }
    bool have = false;
    for (const PieceRecord& pc : rec.pieces) {
      const QuadExt a = abs_of(pc.c);
      if (!have || a < rec.alpha) { rec.alpha = a; have = true; }
    }
    if (rec.alpha.sign() == 0)
      throw InvariantViolation("orbit point lies on the expanding edge");
    // Canonical achieving piece: positive side wins a symmetric tie.
    bool found_hit = false;
    for (const PieceRecord& pc : rec.pieces) {
      if (abs_of(pc.c) != rec.alpha) continue;
      if (!found_hit || (pc.c.sign() > 0 && rec.hit.c.sign() < 0)) { rec.hit = pc; found_hit = true; }
    }
    return rec;
  }
  throw SearchBudgetExceeded("no approach found for orbit point within window budget");
}

namespace detail {

inline std::vector<PieceRecord> pieces_in_window(const std::vector<RatVec2>& orbit,
                                                 const Frame<QuadExt>& f,
                                                 const Rational& u_max,
                                                 const QuadExt& window) {
  std::vector<PieceRecord> out;
  const KInterval<QuadExt> strip = KInterval<QuadExt>::closed(QuadExt(0), QuadExt(u_max));
  const KInterval<QuadExt> wwin = KInterval<QuadExt>::closed(-window, window);
  for (size_t n = 0; n < orbit.size(); ++n) {
    const Vec2<QuadExt> p = f.promote_point(orbit[n]);
    for (const IntVec2& k : lattice_candidates(f, p, strip, wwin)) {
      const Vec2<QuadExt> c = f.to_frame(p + Vec2<QuadExt>{QuadExt(Rational(k.x)), QuadExt(Rational(k.y))});
      out.push_back({static_cast<long>(n), k, c.x, c.y});
    }
  }
  return out;
}

}  // namespace detail

inline std::pair<BoxB, BoxCertificate> build_box(const IntMat2& M, const RatVec2& y0_in,
                                                 const Rational& u_max, const Rational& w_max,
                                                 const Rational& bx_cap) {
  if (sgn(u_max) <= 0 || sgn(w_max) <= 0 || sgn(bx_cap) <= 0)
    throw std::invalid_argument("ambient box extents and face cap must be positive");
  const PositivizedAuto P = positivize(M);
  const ToralAuto& A = P.work;
  const auto f = eigenframe<QuadExt>(A, FieldTag{A.D, A.D});

  BoxCertificate cert;
  cert.matrix = M;
  cert.exponent = P.exponent;
  cert.y0 = reduce_mod1(y0_in);
  cert.u_max = u_max;
  cert.w_max = w_max;
  cert.bx_cap = bx_cap;
  if (cert.y0 == RatVec2{Rational(0), Rational(0)})
    throw DegenerateOrbit("y0 is the origin");

  const FrameRect<QuadExt> ambient{KInterval<QuadExt>::open(QuadExt(0), QuadExt(u_max)),
                                   KInterval<QuadExt>::open(QuadExt(0), QuadExt(w_max))};
  cert.y0_interior = rect_witness(f, ambient, f.promote_point(cert.y0)).has_value();

  cert.orbit = orbit_of(A.M, cert.y0).points;
  const long N = static_cast<long>(cert.orbit.size());

  for (long n = 0; n < N; ++n)
    cert.alphas.push_back(compute_alpha(n, cert.orbit[static_cast<size_t>(n)], f, u_max, w_max));

  cert.alpha_min = cert.alphas[0].alpha;
  for (const AlphaRecord& r : cert.alphas)
    if (r.alpha < cert.alpha_min) cert.alpha_min = r.alpha;

  cert.retained = detail::pieces_in_window(cert.orbit, f, u_max, cert.alpha_min + QuadExt(w_max));
  for (size_t i = 0; i < cert.retained.size(); ++i)
    if (abs_of(cert.retained[i].c) == cert.alpha_min) cert.argmin_ids.push_back(i);
  if (cert.argmin_ids.empty())
    throw InvariantViolation("minimal approach piece lost in retention pass");

  // Distinct orbit points give distinct crossing positions; a collision
  // would mean two orbit points differ by a contracting vector.
  for (size_t i = 0; i < cert.argmin_ids.size(); ++i)
    for (size_t j = i + 1; j < cert.argmin_ids.size(); ++j)
      if (cert.retained[cert.argmin_ids[i]].u0 == cert.retained[cert.argmin_ids[j]].u0)
        throw InvariantViolation("two minimal approach pieces share a crossing position");

  cert.unique_min_index = true;
  for (size_t id : cert.argmin_ids)
    if (cert.retained[id].n != cert.retained[cert.argmin_ids[0]].n) {
      cert.unique_min_index = false;
      break;
    }

  // A minimal piece whose offset is positive and whose crossing is interior
  // to the ambient edge pushes into the open ambient box; those pieces are
  // the eligible face carriers when any exist.
  std::vector<size_t> pool;
  for (size_t id : cert.argmin_ids) {
    const PieceRecord& pc = cert.retained[id];
    if (pc.c.sign() > 0 && pc.u0 < QuadExt(u_max)) pool.push_back(id);
  }
  cert.approach_enters = !pool.empty();
  if (cert.approach_enters) {
    cert.eta = QuadExt(0);
  } else {
    // Enlarge the radius to the midpoint of the exactly-feasible interval:
    // below every non-minimal piece's slack and half the ambient height
    // (the retention window then still dominates every discarded piece).
    QuadExt eta_max = QuadExt(Rational(w_max) / 2);
    for (size_t i = 0; i < cert.retained.size(); ++i) {
      bool is_argmin = false;
      for (size_t id : cert.argmin_ids) if (id == i) { is_argmin = true; break; }
      if (is_argmin) continue;
      const QuadExt slack = abs_of(cert.retained[i].c) - cert.alpha_min;
      if (slack < eta_max) eta_max = slack;
    }
    if (eta_max.sign() <= 0)
      throw PerturbationFailed("no positive radius slack available");
    cert.eta = eta_max / QuadExt(2);
    pool = cert.argmin_ids;
  }
  cert.alpha_star = cert.alpha_min + cert.eta;

  // Innermost crossing wins: every other pool piece then lies outside the
  // open strip (0, u_sel), and nested-face reasoning never sees it.
  cert.selected_id = pool[0];
  for (size_t id : pool)
    if (cert.retained[id].u0 < cert.retained[cert.selected_id].u0) cert.selected_id = id;
  const PieceRecord& sel = cert.retained[cert.selected_id];
  cert.u_sel = sel.u0;

  // Height: below the face-carrier's reach, below half the distance to the
  // nearest piece crossing the open strip from above, below the cap, and
  // inside the ambient half-height.
  QuadExt h = (sel.c + cert.alpha_star) / QuadExt(2);
  for (const PieceRecord& pc : cert.retained) {
    if (!(pc.u0 < cert.u_sel)) continue;
    if (pc.c > cert.alpha_star) {
      const QuadExt half_gap = (pc.c - cert.alpha_star) / QuadExt(2);
      if (half_gap < h) h = half_gap;
    }
  }
  if (QuadExt(bx_cap) < h) h = QuadExt(bx_cap);
  if (QuadExt(Rational(w_max) / 2) < h) h = QuadExt(Rational(w_max) / 2);
  if (h.sign() <= 0) throw InvariantViolation("box height collapsed");
  cert.h = h;

  cert.verdicts.reserve(cert.retained.size());
  for (size_t i = 0; i < cert.retained.size(); ++i) {
    const PieceRecord& pc = cert.retained[i];
    if (i == cert.selected_id) { cert.verdicts.push_back(AvoidVerdict::SelectedFace); continue; }
    if (!(pc.u0 < cert.u_sel)) { cert.verdicts.push_back(AvoidVerdict::OutsideStrip); continue; }
    if ((pc.c + cert.alpha_star).sign() <= 0) { cert.verdicts.push_back(AvoidVerdict::Below); continue; }
    if (pc.c - cert.alpha_star >= h) { cert.verdicts.push_back(AvoidVerdict::Above); continue; }
    throw InvariantViolation("approach piece with no avoidance inequality");
  }

  BoxB box;
  box.aut = A;
  box.exponent = P.exponent;
  box.frame = f;
  box.u_len = cert.u_sel;
  box.w_len = cert.h;
  box.alpha_star = cert.alpha_star;
  box.m_sel = sel.n;
  box.orbit = cert.orbit;
  return {box, cert};
}

// Independent avoidance re-check through the torus-geometry layer: the open
// box must be disjoint from the radius-alpha* contracting segment through
// every orbit point.
inline bool box_avoids_all_approaches(const BoxB& box) {
  for (long n = 0; n < static_cast<long>(box.orbit.size()); ++n)
    if (!segment_rect_pieces(box.frame, box.approach_segment(n), box.rect()).empty())
      return false;
  return true;
}

// Full certificate replay.  Re-derives the deterministic enumerations from
// the recorded inputs, requires the stored data to match them exactly, and
// re-checks every recorded inequality.  Never re-runs any selection
// heuristics: the selections are validated against their defining
// inequalities instead.
inline bool verify_certificate(const BoxCertificate& cert, std::string* why = nullptr) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  PositivizedAuto P;
  try {
    P = positivize(cert.matrix);
  } catch (const std::exception&) {
    return fail("matrix does not analyze");
  }
  if (P.exponent != cert.exponent) return fail("positivization exponent mismatch");
  const ToralAuto& A = P.work;
  const auto f = eigenframe<QuadExt>(A, FieldTag{A.D, A.D});
  if (sgn(cert.u_max) <= 0 || sgn(cert.w_max) <= 0 || sgn(cert.bx_cap) <= 0)
    return fail("non-positive ambient extents");

  const RatOrbit orb = orbit_of(A.M, cert.y0);
  if (orb.points != cert.orbit) return fail("orbit mismatch");
  const long N = static_cast<long>(cert.orbit.size());
  if (static_cast<long>(cert.alphas.size()) != N) return fail("alpha record count mismatch");

  for (long n = 0; n < N; ++n) {
    const AlphaRecord& r = cert.alphas[static_cast<size_t>(n)];
    if (r.n != n) return fail("alpha record index mismatch");
    const Vec2<QuadExt> p = f.promote_point(cert.orbit[static_cast<size_t>(n)]);
    const auto ks = lattice_candidates(f, p, KInterval<QuadExt>::closed(QuadExt(0), QuadExt(cert.u_max)),
                                       KInterval<QuadExt>::closed(QuadExt(-r.window), QuadExt(r.window)));
    if (ks.size() != r.pieces.size()) return fail("alpha piece count mismatch");
    bool hit_seen = false;
    for (size_t i = 0; i < ks.size(); ++i) {
      const PieceRecord& pc = r.pieces[i];
      if (!(ks[i] == pc.k)) return fail("alpha piece lattice vector mismatch");
      const Vec2<QuadExt> c = f.to_frame(p + Vec2<QuadExt>{QuadExt(Rational(pc.k.x)), QuadExt(Rational(pc.k.y))});
      if (c.x != pc.u0 || c.y != pc.c) return fail("alpha piece coordinates mismatch");
      if (abs_of(pc.c) < r.alpha) return fail("alpha is not minimal");
      if (abs_of(pc.c) == r.alpha && pc.k == r.hit.k) hit_seen = true;
    }
    if (!hit_seen) return fail("alpha hit piece not among achieving pieces");
    if (r.alpha.sign() <= 0) return fail("non-positive alpha");
    if (QuadExt(r.window) < r.alpha) return fail("alpha exceeds its certifying window");
  }

  QuadExt amin = cert.alphas[0].alpha;
  for (const AlphaRecord& r : cert.alphas) if (r.alpha < amin) amin = r.alpha;
  if (amin != cert.alpha_min) return fail("alpha_min mismatch");

  const auto retained = detail::pieces_in_window(cert.orbit, f, cert.u_max, cert.alpha_min + QuadExt(cert.w_max));
  if (retained.size() != cert.retained.size()) return fail("retained piece count mismatch");
  for (size_t i = 0; i < retained.size(); ++i) {
    const PieceRecord &a = retained[i], &b = cert.retained[i];
    if (a.n != b.n || !(a.k == b.k) || a.u0 != b.u0 || a.c != b.c)
      return fail("retained piece mismatch");
  }

  std::vector<size_t> argmin;
  for (size_t i = 0; i < retained.size(); ++i) {
    if (abs_of(retained[i].c) < cert.alpha_min) return fail("piece beats alpha_min");
    if (abs_of(retained[i].c) == cert.alpha_min) argmin.push_back(i);
  }
  if (argmin != cert.argmin_ids) return fail("argmin set mismatch");
  if (argmin.empty()) return fail("empty argmin set");

  for (size_t i = 0; i < argmin.size(); ++i)
    for (size_t j = i + 1; j < argmin.size(); ++j)
      if (cert.retained[argmin[i]].u0 == cert.retained[argmin[j]].u0)
        return fail("coincident minimal crossings");

  bool unique_index = true;
  for (size_t i = 1; i < argmin.size(); ++i)
    if (cert.retained[argmin[i]].n != cert.retained[argmin[0]].n) { unique_index = false; break; }
  if (unique_index != cert.unique_min_index) return fail("uniqueness tag mismatch");

  std::vector<size_t> pool;
  for (size_t id : argmin) {
    const PieceRecord& pc = cert.retained[id];
    if (pc.c.sign() > 0 && pc.u0 < QuadExt(cert.u_max)) pool.push_back(id);
  }
  if ((pool.empty() ? false : true) != cert.approach_enters) return fail("approach tag mismatch");

  if (cert.approach_enters) {
    if (cert.eta.sign() != 0) return fail("unexpected perturbation");
  } else {
    if (cert.eta.sign() <= 0) return fail("non-positive perturbation");
    if (!(cert.eta <= QuadExt(Rational(cert.w_max) / 2))) return fail("perturbation exceeds ambient slack");
    for (size_t i = 0; i < cert.retained.size(); ++i) {
      bool is_argmin = false;
      for (size_t id : argmin) if (id == i) { is_argmin = true; break; }
      if (is_argmin) continue;
      if (!(cert.eta < abs_of(cert.retained[i].c) - cert.alpha_min))
        return fail("perturbation not below a piece's slack");
    }
    pool = argmin;
  }
  if (cert.alpha_star != cert.alpha_min + cert.eta) return fail("alpha_star mismatch");

  bool sel_in_pool = false;
  for (size_t id : pool) {
    if (id == cert.selected_id) sel_in_pool = true;
    if (cert.retained[id].u0 < cert.retained[cert.selected_id].u0)
      return fail("selected crossing is not innermost");
  }
  if (!sel_in_pool) return fail("selected piece not eligible");
  const PieceRecord& sel = cert.retained[cert.selected_id];
  if (cert.u_sel != sel.u0) return fail("u_sel mismatch");

  if (cert.h.sign() <= 0) return fail("non-positive height");
  if (!(cert.h <= QuadExt(cert.bx_cap))) return fail("height exceeds cap");
  if (!(cert.h <= QuadExt(Rational(cert.w_max) / 2))) return fail("height exceeds ambient half-height");
  if (!(cert.h <= sel.c + cert.alpha_star)) return fail("far face not inside approach segment");

  if (cert.verdicts.size() != cert.retained.size()) return fail("verdict count mismatch");
  for (size_t i = 0; i < cert.retained.size(); ++i) {
    const PieceRecord& pc = cert.retained[i];
    switch (cert.verdicts[i]) {
      case AvoidVerdict::SelectedFace:
        if (i != cert.selected_id) return fail("spurious selected-face verdict");
        break;
      case AvoidVerdict::OutsideStrip:
        if (pc.u0 < cert.u_sel) return fail("outside-strip verdict inside strip");
        break;
      case AvoidVerdict::Below:
        if ((pc.c + cert.alpha_star).sign() > 0) return fail("below verdict reaches the box");
        break;
      case AvoidVerdict::Above:
        if (!(pc.c - cert.alpha_star >= cert.h)) return fail("above verdict reaches the box");
        break;
    }
  }
  if (cert.verdicts[cert.selected_id] != AvoidVerdict::SelectedFace)
    return fail("selected piece lacks selected-face verdict");
  if (why) why->clear();
  return true;
}

// Reconstructs the box value a certificate describes.  Callers should run
// verify_certificate first: this replays only the cheap spectral analysis
// and trusts the stored extents and selection.
inline BoxB box_from_certificate(const BoxCertificate& cert) {
  const PositivizedAuto P = positivize(cert.matrix);
  if (P.exponent != cert.exponent)
    throw InvariantViolation("certificate exponent does not match its matrix");
  if (cert.selected_id >= cert.retained.size())
    throw InvariantViolation("certificate selected piece out of range");
  BoxB box;
  box.aut = P.work;
  box.exponent = P.exponent;
  box.frame = eigenframe<QuadExt>(P.work, FieldTag{P.work.D, P.work.D});
  box.u_len = cert.u_sel;
  box.w_len = cert.h;
  box.alpha_star = cert.alpha_star;
  box.m_sel = cert.retained[cert.selected_id].n;
  box.orbit = cert.orbit;
  return box;
}

// Reproducible default choice of y0: the smallest-denominator rational
// point interior to the ambient box, scanning denominators upward and
// coordinates lexicographically.
inline std::optional<RatVec2> pick_default_y0(const Frame<QuadExt>& f, const Rational& u_max,
                                              const Rational& w_max, long max_denominator = 64) {
  const FrameRect<QuadExt> ambient{KInterval<QuadExt>::open(QuadExt(0), QuadExt(u_max)),
                                   KInterval<QuadExt>::open(QuadExt(0), QuadExt(w_max))};
  for (long q = 2; q <= max_denominator; ++q)
    for (long a = 0; a < q; ++a)
      for (long b = 0; b < q; ++b) {
        if (a == 0 && b == 0) continue;
        RatVec2 p{Rational(a, q), Rational(b, q)};
        p.x.canonicalize();
        p.y.canonicalize();
        if (rect_witness(f, ambient, f.promote_point(p)).has_value()) return p;
      }
  return std::nullopt;
}

}  // namespace toraldyn
