#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "toraldyn/field.hpp"
#include "toraldyn/quadext.hpp"
#include "toraldyn/rational.hpp"
#include "toraldyn/towerext.hpp"

using namespace toraldyn;
using testutil::make_rng;
using testutil::oracle_sign;
using testutil::rand_quad;
using testutil::rand_rational;
using testutil::rand_tower;

TEST_CASE("rational parsing, canonical form and floors", "[rational]") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-4/8") == Rational(-1, 2));
  CHECK(parse_rational("7") == Rational(7));
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);

  CHECK(floor_of(Rational(-3, 2)) == Integer(-2));
  CHECK(floor_of(Rational(3, 2)) == Integer(1));
  CHECK(floor_of(Rational(-4, 2)) == Integer(-2));
  CHECK(fractional_part(Rational(-3, 2)) == Rational(1, 2));
  CHECK(fractional_part(Rational(5)) == 0);
}

TEST_CASE("squarefree core extraction", "[rational]") {
  CHECK(squarefree_core(5) == 5);
  CHECK(squarefree_core(12) == 3);
  CHECK(squarefree_core(9) == 1);
  CHECK(squarefree_core(8) == 2);
  CHECK(squarefree_core(252) == 7);  // 252 = 2^2 * 3^2 * 7
  CHECK(squarefree_core(1) == 1);
  CHECK(square_scale_of(252) == 6);
  CHECK(square_scale_of(12) == 2);
}

TEST_CASE("quadratic arithmetic identities", "[quadext]") {
  const QuadExt one_plus(Rational(1), Rational(1), 5);
  const QuadExt one_minus(Rational(1), Rational(-1), 5);
  CHECK(one_plus * one_minus == QuadExt(-4));

  // lambda = (3+sqrt(5))/2 is a root of x^2 - 3x + 1.
  const QuadExt lam(Rational(3, 2), Rational(1, 2), 5);
  CHECK(lam * lam - QuadExt(3) * lam + QuadExt(1) == QuadExt(0));

  // Tenth power, independently derived through phi^20 = (L20 + F20*sqrt(5))/2
  // with Fibonacci F20 = 6765 and Lucas L20 = 15127.
  CHECK(lam.pow(10) == QuadExt(Rational(15127, 2), Rational(6765, 2), 5));
  CHECK(lam.pow(10) * lam.inverse().pow(10) == QuadExt(1));

  CHECK(QuadExt::sqrt_of(12) == QuadExt(Rational(0), Rational(2), 3));
  CHECK(QuadExt::sqrt_of(9) == QuadExt(3));
  CHECK(QuadExt::sqrt_of(1) == QuadExt(1));

  CHECK_THROWS_AS(QuadExt(Rational(1), Rational(1), 12), FieldMismatchError);
  CHECK_THROWS_AS(QuadExt(Rational(1), Rational(1), 2) + QuadExt(Rational(1), Rational(1), 3),
                  FieldMismatchError);
  // Rational-valued operands combine with any field.
  CHECK(QuadExt(Rational(2)) + QuadExt(Rational(0), Rational(1), 7) ==
        QuadExt(Rational(2), Rational(1), 7));
}

TEST_CASE("quadratic sign case analysis", "[quadext]") {
  CHECK(QuadExt(Rational(3, 2), Rational(1, 2), 5).sign() == 1);
  CHECK(QuadExt(Rational(1), Rational(-1), 2).sign() < 0);   // 1 - sqrt(2)
  CHECK(QuadExt(Rational(3), Rational(-2), 2).sign() > 0);   // 3 - 2 sqrt(2) = (sqrt2-1)^2
  CHECK(QuadExt(Rational(-3), Rational(2), 2).sign() < 0);
  CHECK(QuadExt(Rational(0), Rational(0), 0).sign() == 0);
  CHECK((QuadExt::sqrt_of(2) * QuadExt::sqrt_of(2) - QuadExt(2)).sign() == 0);
}

TEST_CASE("quadratic field axioms on random values", "[quadext][property]") {
  auto rng = make_rng(20240817);
  for (int i = 0; i < 200; ++i) {
    const long d = (i % 3 == 0) ? 5 : (i % 3 == 1 ? 2 : 163);
    const QuadExt x = rand_quad(rng, d), y = rand_quad(rng, d), z = rand_quad(rng, d);
    CHECK(x + y == y + x);
    CHECK((x + y) + z == x + (y + z));
    CHECK(x * y == y * x);
    CHECK((x * y) * z == x * (y * z));
    CHECK(x * (y + z) == x * y + x * z);
    if (!x.is_zero()) {
      CHECK(x * x.inverse() == QuadExt(1));
      CHECK((x / x) == QuadExt(1));
    }
  }
}

TEST_CASE("quadratic sign agrees with 300-bit certified intervals", "[quadext][oracle]") {
  auto rng = make_rng(991);
  int conclusive = 0;
  for (int i = 0; i < 1000; ++i) {
    const long d = (i % 2 == 0) ? 5 : 7;
    QuadExt x = rand_quad(rng, d);
    if (i % 5 == 0 && !x.is_zero()) {
      // Stress values squeezed within 2^-60 of zero.
      const QuadExt root = QuadExt(Rational(0), rand_rational(rng, 30, 20), d);
      x = root - QuadExt(dyadic_below(root, 60));
    }
    const auto os = oracle_sign(x, 300);
    if (os.has_value()) {
      ++conclusive;
      CHECK(x.sign() == *os);
    } else {
      CHECK(x.sign() == 0);  // only exact zero may defeat the oracle
    }
  }
  CHECK(conclusive > 900);
}

TEST_CASE("tower radical products", "[towerext]") {
  const TowerExt r2(Rational(0), Rational(1), Rational(0), Rational(0), 2, 3);
  const TowerExt r3(Rational(0), Rational(0), Rational(1), Rational(0), 2, 3);
  const TowerExt r6(Rational(0), Rational(0), Rational(0), Rational(1), 2, 3);
  CHECK(r2 * r3 == r6);
  CHECK((r2 * r3 - r6).is_zero());
  CHECK(r2 * r2 == TowerExt(2));
  CHECK(r6 * r6 == TowerExt(6));
  CHECK(r3 * r6 == TowerExt(Rational(0), Rational(3), Rational(0), Rational(0), 2, 3));

  // 1 - sqrt(6) is negative.
  CHECK(TowerExt(Rational(1), Rational(0), Rational(0), Rational(-1), 2, 3).sign() < 0);

  // Non-coprime radicands: in (2,6) the core of the product is 3 and
  // sqrt(2)*sqrt(6) = 2*sqrt(3).
  const TowerExt s2(Rational(0), Rational(1), Rational(0), Rational(0), 2, 6);
  const TowerExt s6(Rational(0), Rational(0), Rational(1), Rational(0), 2, 6);
  CHECK(s2 * s6 == TowerExt::embed(QuadExt(Rational(0), Rational(2), 3), 2, 6));

  CHECK_THROWS_AS(TowerExt(Rational(1), Rational(1), Rational(1), Rational(1), 5, 5),
                  FieldMismatchError);
  CHECK_THROWS_AS(TowerExt::embed(QuadExt(Rational(0), Rational(1), 7), 2, 3),
                  FieldMismatchError);
}

TEST_CASE("tower field axioms on random values", "[towerext][property]") {
  auto rng = make_rng(555);
  for (int i = 0; i < 120; ++i) {
    const long d1 = (i % 2 == 0) ? 2 : 3;
    const long d2 = (i % 2 == 0) ? 3 : 10;  // (3,10): gcd 1; also test (2,6) below
    const TowerExt x = rand_tower(rng, d1, d2), y = rand_tower(rng, d1, d2),
                   z = rand_tower(rng, d1, d2);
    CHECK((x + y) + z == x + (y + z));
    CHECK(x * y == y * x);
    CHECK((x * y) * z == x * (y * z));
    CHECK(x * (y + z) == x * y + x * z);
    if (!x.is_zero()) CHECK(x * x.inverse() == TowerExt(1));
  }
  for (int i = 0; i < 60; ++i) {
    const TowerExt x = rand_tower(rng, 2, 6), y = rand_tower(rng, 2, 6);
    CHECK((x * y) - (y * x) == TowerExt(0));
    if (!x.is_zero()) CHECK(x * x.inverse() == TowerExt(1));
  }
}

TEST_CASE("tower sign agrees with 300-bit certified intervals", "[towerext][oracle]") {
  auto rng = make_rng(777);
  int conclusive = 0;
  for (int i = 0; i < 1000; ++i) {
    TowerExt x = rand_tower(rng, (i % 2) ? 2 : 3, (i % 2) ? 3 : 7);
    if (i % 7 == 0 && !x.is_zero()) {
      const Rational lo = Rational(floor_of(x * TowerExt(Rational(Integer(1) << 50)))) /
                          Rational(Integer(1) << 50);
      x = x - TowerExt(lo);  // in [0, 2^-50)
    }
    const auto os = oracle_sign(x, 300);
    if (os.has_value()) {
      ++conclusive;
      CHECK(x.sign() == *os);
    } else {
      CHECK(x.sign() == 0);
    }
  }
  CHECK(conclusive > 900);
}

TEST_CASE("exact floors are certified", "[floor]") {
  auto rng = make_rng(31337);
  for (int i = 0; i < 300; ++i) {
    const QuadExt q = rand_quad(rng, 5);
    const Integer f = floor_of(q);
    CHECK((q - QuadExt(Rational(f))).sign() >= 0);
    CHECK((q - QuadExt(Rational(f + 1))).sign() < 0);

    const TowerExt t = rand_tower(rng, 2, 3);
    const Integer g = floor_of(t);
    CHECK((t - TowerExt(Rational(g))).sign() >= 0);
    CHECK((t - TowerExt(Rational(g + 1))).sign() < 0);
  }
  // Floor exactly at an integer boundary.
  CHECK(floor_of(QuadExt(Rational(3))) == 3);
  CHECK(floor_of(QuadExt(Rational(-3))) == -3);
  CHECK(floor_of(QuadExt(Rational(0), Rational(1), 2) * QuadExt(Rational(0), Rational(1), 2)) == 2);
}

TEST_CASE("compositum tags and promotion", "[field]") {
  CHECK(compositum(5, 5).degenerate());
  CHECK_FALSE(compositum(2, 3).degenerate());
  CHECK(compositum(6, 2).d1 == 2);

  const QuadExt q(Rational(1, 2), Rational(3), 5);
  CHECK(promote_quad<QuadExt>(q, compositum(5, 5)) == q);
  const TowerExt t = promote_quad<TowerExt>(q, compositum(2, 5));
  CHECK(t.c00() == Rational(1, 2));
  CHECK(t.c10() == Rational(3));
  CHECK_THROWS_AS(promote_quad<QuadExt>(q, compositum(2, 3)), FieldMismatchError);
  // The tower is never instantiated with equal radicands.
  CHECK_THROWS_AS(promote_quad<TowerExt>(q, compositum(5, 5)), FieldMismatchError);
}
