#pragma once

// Spectral analysis of hyperbolic toral automorphisms in dimension two.
//
// A matrix M in GL(2,Z) (|det| = 1) induces an automorphism of the torus
// R^2/Z^2.  It is hyperbolic iff no eigenvalue has modulus one; for d = 2
// this is |trace| > 2 when det = 1 and trace != 0 when det = -1.  The
// eigenvalues live in Q(sqrt(D)) with D the squarefree core of
// trace^2 - 4 det, and the eigenvector slopes are irrational, so both
// eigenlines project densely into the torus.

#include <stdexcept>
#include <vector>

#include "toraldyn/field.hpp"
#include "toraldyn/matrix2.hpp"
#include "toraldyn/quadext.hpp"
#include "toraldyn/rational.hpp"
#include "toraldyn/towerext.hpp"

namespace toraldyn {

class NotUnimodularError : public std::runtime_error {
 public:
  explicit NotUnimodularError(const std::string& w) : std::runtime_error(w) {}
};
class NotHyperbolicError : public std::runtime_error {
 public:
  explicit NotHyperbolicError(const std::string& w) : std::runtime_error(w) {}
};
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& w) : std::logic_error(w) {}
};

struct ToralAuto {
  IntMat2 M;
  long det = 1;           // ±1
  Integer trace;
  long D = 0;             // squarefree core of trace^2 - 4 det, always >= 2
  QuadExt lambda_plus;    // expanding eigenvalue, |lambda_plus| > 1
  QuadExt lambda_minus;   // contracting eigenvalue, lambda_plus * lambda_minus = det
  QuadExt slope_plus;     // eigenvectors v± = (1, slope±); slopes are irrational
  QuadExt slope_minus;
};

inline ToralAuto analyze(const IntMat2& M) {
  ToralAuto A;
  A.M = M;
  const Integer dt = M.det();
  if (dt != 1 && dt != -1)
    throw NotUnimodularError("matrix determinant is " + dt.get_str() + ", need ±1");
  A.det = (dt == 1) ? 1 : -1;
  A.trace = M.trace();

  const bool hyperbolic =
      (A.det == 1) ? (abs(A.trace) > 2) : (sgn(A.trace) != 0);
  if (!hyperbolic)
    throw NotHyperbolicError("matrix " + M.str() + " has an eigenvalue of modulus one");

  const Integer disc = A.trace * A.trace - 4 * A.det;
  if (!disc.fits_slong_p())
    throw std::overflow_error("discriminant too large for analysis");
  const long disc_l = disc.get_si();
  A.D = squarefree_core(disc_l);
  const long scale = square_scale_of(disc_l);
  if (A.D < 2)
    throw InvariantViolation("hyperbolic matrix produced rational eigenvalues");

  // sqrt(disc) = scale * sqrt(D); expanding root has the sign of the trace.
  const QuadExt half(Rational(1, 2));
  const QuadExt root(Rational(0), Rational(scale), A.D);
  const QuadExt tr{Rational(A.trace)};
  if (sgn(A.trace) > 0) {
    A.lambda_plus = (tr + root) * half;
    A.lambda_minus = (tr - root) * half;
  } else {
    A.lambda_plus = (tr - root) * half;
    A.lambda_minus = (tr + root) * half;
  }
  if (!(abs_of(A.lambda_plus) > QuadExt(1)) || !(abs_of(A.lambda_minus) < QuadExt(1)))
    throw InvariantViolation("eigenvalue moduli not separated by one");
  if (A.lambda_plus * A.lambda_minus != QuadExt(Rational(A.det)) ||
      A.lambda_plus + A.lambda_minus != tr)
    throw InvariantViolation("eigenvalue trace/determinant identities failed");

  // m01 = 0 would force integer eigenvalues, impossible for hyperbolic M.
  if (sgn(M.m01) == 0)
    throw InvariantViolation("hyperbolic matrix with m01 = 0");
  const Rational inv01 = Rational(1) / Rational(M.m01);
  A.slope_plus = (A.lambda_plus - QuadExt(Rational(M.m00))) * QuadExt(inv01);
  A.slope_minus = (A.lambda_minus - QuadExt(Rational(M.m00))) * QuadExt(inv01);
  if (A.slope_plus.is_rational() || A.slope_minus.is_rational())
    throw InvariantViolation("eigenvector slope is rational");
  return A;
}

// The nondense-orbit constructions need positive eigenvalues; squaring fixes
// the signs and leaves the eigenlines (and nondense sets) unchanged.
struct PositivizedAuto {
  ToralAuto work;   // analyze(M^exponent)
  int exponent = 1; // 1 or 2
};

inline PositivizedAuto positivize(const IntMat2& M) {
  ToralAuto A = analyze(M);
  if (A.lambda_plus.sign() > 0 && A.lambda_minus.sign() > 0) return {A, 1};
  return {analyze(M * M), 2};
}

inline RatVec2 reduce_mod1(const RatVec2& p) {
  return {fractional_part(p.x), fractional_part(p.y)};
}

inline RatVec2 apply_mod1(const IntMat2& M, const RatVec2& p) {
  return reduce_mod1(M.apply(p));
}

struct RatOrbit {
  std::vector<RatVec2> points;  // canonical representatives in [0,1)^2
  long period = 0;
};

// Forward orbit of a rational point: denominators are preserved mod 1, so
// the orbit is finite and the map permutes the finite denominator grid.
inline RatOrbit orbit_of(const IntMat2& M, const RatVec2& start) {
  if (M.det() != 1 && M.det() != -1) throw NotUnimodularError("orbit of non-unimodular map");
  RatOrbit orb;
  const RatVec2 p0 = reduce_mod1(start);
  const Integer q = lcm(p0.x.get_den(), p0.y.get_den());
  const Integer cap = q * q + 1;
  RatVec2 p = p0;
  for (Integer i = 0; i < cap; ++i) {
    orb.points.push_back(p);
    p = apply_mod1(M, p);
    if (p == p0) {
      orb.period = static_cast<long>(orb.points.size());
      return orb;
    }
  }
  throw InvariantViolation("rational orbit failed to close");
}

// True when the contracting directions of A and B are transversal, decided
// exactly in the compositum field.
inline bool contracting_transversal(const ToralAuto& A, const ToralAuto& B) {
  if (A.D == B.D) return A.slope_minus != B.slope_minus;
  const FieldTag tag = compositum(A.D, B.D);
  return promote_quad<TowerExt>(A.slope_minus, tag) !=
         promote_quad<TowerExt>(B.slope_minus, tag);
}

}  // namespace toraldyn
