#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "toraldyn/boxbuild.hpp"

using namespace toraldyn;

namespace {

IntMat2 mat(long a, long b, long c, long d) {
  IntMat2 m;
  m.m00 = a; m.m01 = b; m.m10 = c; m.m11 = d;
  return m;
}

struct BrutePiece {
  IntVec2 k;
  QuadExt u0, c;
};

// Independent oracle: scan every lattice vector in a box and keep the
// contracting-line crossings of the strip 0 <= u <= u_max.
std::vector<BrutePiece> brute_pieces(const Frame<QuadExt>& f, const Vec2<QuadExt>& p,
                                     const Rational& u_max, long R) {
  std::vector<BrutePiece> out;
  for (long a = -R; a <= R; ++a)
    for (long b = -R; b <= R; ++b) {
      const Vec2<QuadExt> c = f.to_frame(p + Vec2<QuadExt>{QuadExt(Rational(a)), QuadExt(Rational(b))});
      if (c.x >= QuadExt(0) && c.x <= QuadExt(u_max))
        out.push_back({{Integer(a), Integer(b)}, c.x, c.y});
    }
  return out;
}

std::optional<QuadExt> brute_min_offset(const std::vector<BrutePiece>& pieces) {
  std::optional<QuadExt> best;
  for (const BrutePiece& pc : pieces) {
    const QuadExt a = abs_of(pc.c);
    if (!best || a < *best) best = a;
  }
  return best;
}

}  // namespace

TEST_CASE("first-approach radius matches a brute-force lattice scan") {
  const ToralAuto A = positivize(mat(2, 1, 1, 1)).work;
  const auto f = eigenframe<QuadExt>(A, FieldTag{A.D, A.D});
  const Rational u_max(1, 10), w_max(1, 10);
  const std::vector<RatVec2> pts = {
      {Rational(1, 5), Rational(2, 5)},  {Rational(4, 5), Rational(3, 5)},
      {Rational(1, 2), Rational(1, 2)},  {Rational(3, 7), Rational(1, 7)},
      {Rational(2, 9), Rational(5, 9)},
  };
  for (size_t i = 0; i < pts.size(); ++i) {
    const AlphaRecord rec = compute_alpha(static_cast<long>(i), pts[i], f, u_max, w_max);
    REQUIRE(rec.alpha.sign() > 0);
    REQUIRE(abs_of(rec.hit.c) == rec.alpha);
    REQUIRE(rec.hit.u0 >= QuadExt(0));
    REQUIRE(rec.hit.u0 <= QuadExt(u_max));
    // Oracle adequacy: the found witness sits well inside the scan box.
    REQUIRE(abs(rec.hit.k.x) < 40);
    REQUIRE(abs(rec.hit.k.y) < 40);
    const auto brute = brute_min_offset(brute_pieces(f, f.promote_point(pts[i]), u_max, 40));
    REQUIRE(brute.has_value());
    REQUIRE(*brute == rec.alpha);
  }
}

TEST_CASE("widening the ambient edge never increases the approach radius") {
  const ToralAuto A = positivize(mat(2, 1, 1, 1)).work;
  const auto f = eigenframe<QuadExt>(A, FieldTag{A.D, A.D});
  const RatVec2 y{Rational(1, 5), Rational(2, 5)};
  const Rational w_max(1, 10);
  QuadExt prev;
  bool have_prev = false;
  for (const Rational& u_max : {Rational(1, 20), Rational(1, 10), Rational(1, 5), Rational(2, 5)}) {
    const AlphaRecord rec = compute_alpha(0, y, f, u_max, w_max);
    if (have_prev) REQUIRE(rec.alpha <= prev);
    prev = rec.alpha;
    have_prev = true;
  }
}

TEST_CASE("box construction for the cat map and the period-two point") {
  const Rational u_max(1, 10), w_max(1, 10), cap(1, 50);
  const RatVec2 y0{Rational(1, 5), Rational(2, 5)};
  auto [box, cert] = build_box(mat(2, 1, 1, 1), y0, u_max, w_max, cap);

  SECTION("certificate replays") {
    std::string why;
    const bool ok = verify_certificate(cert, &why);
    INFO(why);
    REQUIRE(ok);
  }
  SECTION("independent avoidance re-check and structural facts") {
    REQUIRE(box_avoids_all_approaches(box));
    REQUIRE(box.u_len.sign() > 0);
    REQUIRE(box.w_len.sign() > 0);
    REQUIRE(box.w_len <= QuadExt(cap));
    REQUIRE(cert.orbit.size() == 2);
    // The origin is a vertex, not a member, of the open box.
    REQUIRE_FALSE(rect_witness(box.frame, box.rect(),
                               Vec2<QuadExt>{QuadExt(0), QuadExt(0)})
                      .has_value());
    // The far contracting face sits inside the selected approach segment.
    REQUIRE(cert.h <= cert.retained[cert.selected_id].c + cert.alpha_star);
  }
  SECTION("case tags agree with an independent recomputation") {
    const auto f = box.frame;
    std::vector<BrutePiece> all;
    for (const RatVec2& p : cert.orbit)
      for (const BrutePiece& pc : brute_pieces(f, f.promote_point(p), u_max, 40)) all.push_back(pc);
    const QuadExt amin = *brute_min_offset(all);
    REQUIRE(amin == cert.alpha_min);
    bool enters = false;
    for (const BrutePiece& pc : all)
      if (abs_of(pc.c) == amin && pc.c.sign() > 0 && pc.u0 < QuadExt(u_max)) enters = true;
    REQUIRE(enters == cert.approach_enters);
    if (cert.approach_enters) REQUIRE(cert.eta.sign() == 0);
    else REQUIRE(cert.eta.sign() > 0);
  }
  SECTION("tampered certificates are rejected") {
    {
      BoxCertificate bad = cert;
      bad.retained[0].c = -bad.retained[0].c;
      REQUIRE_FALSE(verify_certificate(bad));
    }
    {
      BoxCertificate bad = cert;
      bad.h = bad.h + QuadExt(1);
      REQUIRE_FALSE(verify_certificate(bad));
    }
    {
      BoxCertificate bad = cert;
      bad.alpha_min = bad.alpha_min / QuadExt(2);
      REQUIRE_FALSE(verify_certificate(bad));
    }
    {
      BoxCertificate bad = cert;
      bad.u_sel = bad.u_sel * QuadExt(2);
      REQUIRE_FALSE(verify_certificate(bad));
    }
  }
  SECTION("halving the face cap halves the admissible height") {
    auto [box2, cert2] = build_box(mat(2, 1, 1, 1), y0, u_max, w_max, cap / 2);
    REQUIRE(verify_certificate(cert2));
    REQUIRE(box2.w_len <= QuadExt(cap / 2));
    REQUIRE(box2.u_len == box.u_len);
  }
}

TEST_CASE("tube extents scale by the eigenvalues") {
  auto [box, cert] = build_box(mat(2, 1, 1, 1), {Rational(1, 5), Rational(2, 5)},
                               Rational(1, 10), Rational(1, 10), Rational(1, 50));
  (void)cert;
  const auto r0 = box.tube_rect(0);
  REQUIRE(r0.u.hi == box.u_len);
  REQUIRE(r0.w.hi == box.w_len);
  for (long n = 1; n <= 6; ++n) {
    const auto rn = box.tube_rect(n);
    const auto rp = box.tube_rect(n - 1);
    REQUIRE(rn.u.hi == rp.u.hi * box.aut.lambda_minus);
    REQUIRE(rn.w.hi == rp.w.hi * box.aut.lambda_plus);
    REQUIRE(rn.u.lo == QuadExt(0));
  }
}

TEST_CASE("construction across other matrices and points") {
  struct Case {
    IntMat2 m;
    RatVec2 y0;
  };
  const std::vector<Case> cases = {
      {mat(2, 1, 1, 1), {Rational(1, 2), Rational(1, 2)}},
      {mat(2, 3, 1, 2), {Rational(1, 5), Rational(2, 5)}},
      {mat(1, 1, 1, 2), {Rational(1, 3), Rational(1, 3)}},
      {mat(-2, -1, -1, -1), {Rational(1, 5), Rational(2, 5)}},
      {mat(0, 1, 1, 1), {Rational(1, 3), Rational(2, 3)}},
  };
  int perturbed = 0, direct = 0;
  for (const Case& c : cases) {
    auto [box, cert] = build_box(c.m, c.y0, Rational(1, 10), Rational(1, 10), Rational(1, 50));
    std::string why;
    const bool ok = verify_certificate(cert, &why);
    INFO(c.m.str() << " y0=" << to_string(c.y0.x) << "," << to_string(c.y0.y) << " : " << why);
    REQUIRE(ok);
    REQUIRE(box_avoids_all_approaches(box));
    if (cert.approach_enters) { ++direct; REQUIRE(cert.eta.sign() == 0); }
    else { ++perturbed; REQUIRE(cert.eta.sign() > 0); }
  }
  // Both live construction branches appear in this instance list.
  REQUIRE(perturbed >= 1);
  REQUIRE(direct >= 1);
}

TEST_CASE("degenerate starting points are rejected") {
  REQUIRE_THROWS_AS(build_box(mat(2, 1, 1, 1), {Rational(0), Rational(0)}, Rational(1, 10),
                              Rational(1, 10), Rational(1, 50)),
                    DegenerateOrbit);
  REQUIRE_THROWS_AS(build_box(mat(2, 1, 1, 1), {Rational(3), Rational(-2)}, Rational(1, 10),
                              Rational(1, 10), Rational(1, 50)),
                    DegenerateOrbit);
}

TEST_CASE("default starting point is deterministic and interior") {
  const ToralAuto A = positivize(mat(2, 1, 1, 1)).work;
  const auto f = eigenframe<QuadExt>(A, FieldTag{A.D, A.D});
  const auto y0 = pick_default_y0(f, Rational(1, 10), Rational(1, 10));
  REQUIRE(y0.has_value());
  const FrameRect<QuadExt> ambient{KInterval<QuadExt>::open(QuadExt(0), QuadExt(Rational(1, 10))),
                                   KInterval<QuadExt>::open(QuadExt(0), QuadExt(Rational(1, 10)))};
  REQUIRE(rect_witness(f, ambient, f.promote_point(*y0)).has_value());
  const auto again = pick_default_y0(f, Rational(1, 10), Rational(1, 10));
  REQUIRE(again.has_value());
  REQUIRE(*again == *y0);
  // A box built from the default point certifies too.
  auto [box, cert] = build_box(mat(2, 1, 1, 1), *y0, Rational(1, 10), Rational(1, 10), Rational(1, 50));
  REQUIRE(verify_certificate(cert));
  REQUIRE(cert.y0_interior);
  REQUIRE(box_avoids_all_approaches(box));
}

TEST_CASE("expanding-direction slices of a projected rectangle") {
  auto [box, cert] = build_box(mat(2, 1, 1, 1), {Rational(1, 5), Rational(2, 5)},
                               Rational(1, 10), Rational(1, 10), Rational(1, 50));
  (void)cert;
  const auto f = box.frame;
  const auto r = box.rect();
  const Vec2<QuadExt> mid = f.from_frame({box.u_len / QuadExt(2), box.w_len / QuadExt(2)});
  const auto sl = slices_through(f, r, mid);
  REQUIRE(sl.size() == 1);
  REQUIRE(sl[0].u.lo == r.u.lo);
  REQUIRE(sl[0].u.hi == r.u.hi);
  REQUIRE(sl[0].w == box.w_len / QuadExt(2));
  // A second point of the same component yields a translate slice: same
  // u-extent, different contracting level.
  const Vec2<QuadExt> mid2 = f.from_frame({box.u_len / QuadExt(4), box.w_len / QuadExt(4)});
  const auto sl2 = slices_through(f, r, mid2);
  REQUIRE(sl2.size() == 1);
  REQUIRE(sl2[0].u.lo == sl[0].u.lo);
  REQUIRE(sl2[0].u.hi == sl[0].u.hi);
  REQUIRE(sl2[0].w != sl[0].w);
  // Outside point: no slice.
  REQUIRE(slices_through(f, r, f.from_frame({box.u_len * QuadExt(2), box.w_len / QuadExt(2)})).empty());
}
