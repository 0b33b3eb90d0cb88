#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "toraldyn/automorphism.hpp"

using namespace toraldyn;

namespace {

IntMat2 mat(long a, long b, long c, long d) {
  IntMat2 m;
  m.m00 = a; m.m01 = b; m.m10 = c; m.m11 = d;
  return m;
}

// Every analyzed matrix must satisfy the eigen equations M v = lambda v with
// v = (1, slope), plus the trace/determinant relations, all in exact arithmetic.
void check_eigen_identities(const ToralAuto& A) {
  const QuadExt a{Rational(A.M.m00)}, b{Rational(A.M.m01)};
  const QuadExt c{Rational(A.M.m10)}, d{Rational(A.M.m11)};
  for (int which = 0; which < 2; ++which) {
    const QuadExt& lam = which ? A.lambda_minus : A.lambda_plus;
    const QuadExt& w = which ? A.slope_minus : A.slope_plus;
    REQUIRE(a + b * w == lam);
    REQUIRE(c + d * w == lam * w);
    REQUIRE_FALSE(w.is_rational());
  }
  REQUIRE(A.lambda_plus + A.lambda_minus == QuadExt(Rational(A.trace)));
  REQUIRE(A.lambda_plus * A.lambda_minus == QuadExt(Rational(A.det)));
  REQUIRE(abs_of(A.lambda_plus) > QuadExt(1));
  REQUIRE(abs_of(A.lambda_minus) < QuadExt(1));
}

}  // namespace

TEST_CASE("arnold cat matrix has golden-ratio spectrum") {
  const ToralAuto A = analyze(mat(2, 1, 1, 1));
  REQUIRE(A.det == 1);
  REQUIRE(A.trace == 3);
  REQUIRE(A.D == 5);
  REQUIRE(A.lambda_plus == QuadExt(Rational(3, 2), Rational(1, 2), 5));
  REQUIRE(A.lambda_minus == QuadExt(Rational(3, 2), Rational(-1, 2), 5));
  REQUIRE(A.slope_plus == QuadExt(Rational(-1, 2), Rational(1, 2), 5));
  REQUIRE(A.slope_minus == QuadExt(Rational(-1, 2), Rational(-1, 2), 5));
  check_eigen_identities(A);
}

TEST_CASE("discriminant with square factor is reduced to its core") {
  const ToralAuto A = analyze(mat(2, 3, 1, 2));  // trace 4, disc 12 = 4 * 3
  REQUIRE(A.D == 3);
  REQUIRE(A.lambda_plus == QuadExt(Rational(2), Rational(1), 3));
  check_eigen_identities(A);
}

TEST_CASE("negative trace selects the expanding branch correctly") {
  const ToralAuto A = analyze(mat(-2, -1, -1, -1));
  REQUIRE(A.trace == -3);
  REQUIRE(A.lambda_plus == QuadExt(Rational(-3, 2), Rational(-1, 2), 5));
  REQUIRE(A.lambda_plus.sign() < 0);
  check_eigen_identities(A);
}

TEST_CASE("determinant -1 matrices are handled") {
  const ToralAuto A = analyze(mat(0, 1, 1, 1));  // trace 1, det -1, disc 5
  REQUIRE(A.det == -1);
  REQUIRE(A.D == 5);
  REQUIRE(A.lambda_plus == QuadExt(Rational(1, 2), Rational(1, 2), 5));
  REQUIRE(A.lambda_minus == QuadExt(Rational(1, 2), Rational(-1, 2), 5));
  check_eigen_identities(A);
}

TEST_CASE("non-hyperbolic and non-unimodular matrices are rejected") {
  REQUIRE_THROWS_AS(analyze(mat(1, 1, 0, 1)), NotHyperbolicError);   // parabolic shear
  REQUIRE_THROWS_AS(analyze(mat(0, 1, 1, 0)), NotHyperbolicError);   // det -1, trace 0
  REQUIRE_THROWS_AS(analyze(mat(0, -1, 1, 0)), NotHyperbolicError);  // rotation
  REQUIRE_THROWS_AS(analyze(mat(1, 2, 2, 1)), NotUnimodularError);   // det -3
  REQUIRE_THROWS_AS(analyze(mat(2, 0, 0, 2)), NotUnimodularError);   // det 4
}

TEST_CASE("positivize keeps matrices with positive spectrum") {
  const PositivizedAuto P = positivize(mat(2, 1, 1, 1));
  REQUIRE(P.exponent == 1);
  REQUIRE(P.work.M == mat(2, 1, 1, 1));
  REQUIRE(P.work.lambda_plus.sign() > 0);
  REQUIRE(P.work.lambda_minus.sign() > 0);
}

TEST_CASE("positivize squares matrices with a negative eigenvalue") {
  SECTION("both eigenvalues negative") {
    const PositivizedAuto P = positivize(mat(-2, -1, -1, -1));
    REQUIRE(P.exponent == 2);
    REQUIRE(P.work.M == mat(5, 3, 3, 2));
  }
  SECTION("determinant -1 forces mixed signs") {
    const PositivizedAuto P = positivize(mat(0, 1, 1, 1));
    REQUIRE(P.exponent == 2);
    REQUIRE(P.work.M == mat(1, 1, 1, 2));
    REQUIRE(P.work.det == 1);
  }
  SECTION("squared map always has positive spectrum") {
    const PositivizedAuto P = positivize(mat(0, 1, 1, 1));
    REQUIRE(P.work.lambda_plus.sign() > 0);
    REQUIRE(P.work.lambda_minus.sign() > 0);
    // Contracting line of the square equals the contracting line of the map.
    const ToralAuto A = analyze(mat(0, 1, 1, 1));
    REQUIRE(P.work.slope_minus == A.slope_minus);
  }
}

TEST_CASE("rational orbits close with the expected period") {
  const IntMat2 M = mat(2, 1, 1, 1);
  SECTION("fifths") {
    const RatOrbit orb = orbit_of(M, {Rational(1, 5), Rational(2, 5)});
    REQUIRE(orb.period == 2);
    REQUIRE(orb.points[0] == RatVec2{Rational(1, 5), Rational(2, 5)});
    REQUIRE(orb.points[1] == RatVec2{Rational(4, 5), Rational(3, 5)});
  }
  SECTION("halves") {
    const RatOrbit orb = orbit_of(M, {Rational(1, 2), Rational(1, 2)});
    REQUIRE(orb.period == 3);
    REQUIRE(orb.points[1] == RatVec2{Rational(1, 2), Rational(0)});
    REQUIRE(orb.points[2] == RatVec2{Rational(0), Rational(1, 2)});
  }
  SECTION("fixed point at origin") {
    const RatOrbit orb = orbit_of(M, {Rational(0), Rational(0)});
    REQUIRE(orb.period == 1);
  }
  SECTION("start outside the unit square is reduced first") {
    const RatOrbit orb = orbit_of(M, {Rational(6, 5), Rational(-3, 5)});
    REQUIRE(orb.points[0] == RatVec2{Rational(1, 5), Rational(2, 5)});
    REQUIRE(orb.period == 2);
  }
}

TEST_CASE("orbit points all lie on the denominator grid") {
  const RatOrbit orb = orbit_of(mat(2, 3, 1, 2), {Rational(3, 7), Rational(1, 7)});
  REQUIRE(orb.period >= 1);
  for (const auto& p : orb.points) {
    REQUIRE(Rational(7) * p.x == floor_of(Rational(7) * p.x));
    REQUIRE(Rational(7) * p.y == floor_of(Rational(7) * p.y));
    REQUIRE(p.x >= 0); REQUIRE(p.x < 1);
    REQUIRE(p.y >= 0); REQUIRE(p.y < 1);
  }
}

TEST_CASE("contracting directions: transversality decisions") {
  const ToralAuto T = analyze(mat(2, 1, 1, 1));
  const ToralAuto S = analyze(mat(1, 1, 1, 2));
  const ToralAuto Tinv = analyze(mat(1, -1, -1, 2));
  const ToralAuto U3 = analyze(mat(2, 3, 1, 2));  // lives in a different field
  REQUIRE(contracting_transversal(T, S));
  REQUIRE_FALSE(contracting_transversal(T, T));
  REQUIRE(contracting_transversal(T, Tinv));
  // The contracting slope of the inverse is the expanding slope of the map.
  REQUIRE(Tinv.slope_minus == T.slope_plus);
  REQUIRE(contracting_transversal(T, U3));
  REQUIRE(contracting_transversal(U3, T));
}

TEST_CASE("random unimodular products: exact spectral identities") {
  auto rng = testutil::make_rng(20260823);
  std::uniform_int_distribution<int> shear_count(3, 8);
  std::uniform_int_distribution<long> shear_k(-3, 3);
  std::uniform_int_distribution<int> coin(0, 1);
  int analyzed = 0;
  for (int trial = 0; trial < 400 && analyzed < 50; ++trial) {
    IntMat2 M = IntMat2::identity();
    const int n = shear_count(rng);
    for (int i = 0; i < n; ++i) {
      long k = shear_k(rng);
      if (k == 0) k = 1;
      IntMat2 Sh = IntMat2::identity();
      if (coin(rng)) Sh.m01 = k; else Sh.m10 = k;
      M = M * Sh;
    }
    if (coin(rng)) M = M * mat(0, 1, -1, 0);  // mix in a rotation (det 1)
    const Integer dt = M.det();
    REQUIRE((dt == 1 || dt == -1));
    const bool hyperbolic =
        (dt == 1) ? (abs(M.trace()) > 2) : (sgn(M.trace()) != 0);
    if (!hyperbolic) continue;
    const ToralAuto A = analyze(M);
    check_eigen_identities(A);
    // Matrix action on the exact eigenvector agrees componentwise.
    const Vec2<QuadExt> vminus{QuadExt(1), A.slope_minus};
    const Vec2<QuadExt> image = M.apply(vminus);
    REQUIRE(image.x == A.lambda_minus * vminus.x);
    REQUIRE(image.y == A.lambda_minus * vminus.y);
    const PositivizedAuto P = positivize(M);
    REQUIRE(P.work.lambda_plus.sign() > 0);
    REQUIRE(P.work.lambda_minus.sign() > 0);
    REQUIRE(P.work.det == 1);
    ++analyzed;
  }
  REQUIRE(analyzed == 50);
}
