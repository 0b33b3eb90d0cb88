#pragma once

// Exact arithmetic in real biquadratic towers Q(sqrt(d1), sqrt(d2)).
//
// A value is c00 + c01*sqrt(d1) + c10*sqrt(d2) + c11*sqrt(e) where
// d1 < d2 are distinct squarefree integers >= 2 and e is the squarefree
// core of d1*d2 (with g = gcd(d1,d2), a = d1/g, b = d2/g we have e = a*b
// and sqrt(d1)*sqrt(d2) = g*sqrt(e)).  The basis {1, sqrt(d1), sqrt(d2),
// sqrt(e)} is closed under multiplication:
//   sqrt(d1)*sqrt(e) = a*sqrt(d2),   sqrt(d2)*sqrt(e) = b*sqrt(d1).
//
// Normal form: a rational value has tag (0,0) and combines with any tower;
// mixing two distinct genuine towers throws.  A degenerate tower (d1 == d2)
// is never constructed: such a value lives in Q(sqrt(d)) and callers must
// collapse to QuadExt instead (see field_dispatch helpers).
//
// Sign determination is exact and needs no precision loop: split
// x = A + B*sqrt(d2) with A, B in Q(sqrt(d1)) (B = c10 + (c11/g)*sqrt(d1));
// if the signs of A and B agree the answer is immediate, otherwise it is
// decided by the sign of A^2 - B^2*d2, a QuadExt sign query.

#include <cmath>
#include <numeric>
#include <string>

#include "toraldyn/quadext.hpp"
#include "toraldyn/rational.hpp"

namespace toraldyn {

class TowerExt {
 public:
  TowerExt() : c00_(0), c01_(0), c10_(0), c11_(0), d1_(0), d2_(0) {}
  TowerExt(long v) : TowerExt() { c00_ = v; }              // NOLINT(runtime/explicit)
  TowerExt(const Rational& v) : TowerExt() { c00_ = v; }   // NOLINT(runtime/explicit)
  TowerExt(Rational c00, Rational c01, Rational c10, Rational c11, long d1, long d2)
      : c00_(std::move(c00)),
        c01_(std::move(c01)),
        c10_(std::move(c10)),
        c11_(std::move(c11)),
        d1_(d1),
        d2_(d2) {
    if (d1_ > d2_) {
      std::swap(d1_, d2_);
      std::swap(c01_, c10_);
    }
    if (d1_ != 0 || d2_ != 0) {
      if (d1_ == d2_)
        throw FieldMismatchError("degenerate tower (d1 == d2): collapse to QuadExt");
      if (d1_ < 2 || d2_ < 2 || squarefree_core(d1_) != d1_ || squarefree_core(d2_) != d2_)
        throw FieldMismatchError("tower radicands must be distinct squarefree >= 2");
    }
    normalize();
  }

  // Embeds a QuadExt into the tower (d1, d2); its radicand must be one of
  // 0, d1, d2 or the core e.
  static TowerExt embed(const QuadExt& q, long d1, long d2) {
    if (d1 > d2) std::swap(d1, d2);
    Rational c01(0), c10(0), c11(0);
    if (q.d() == d1)
      c01 = q.b();
    else if (q.d() == d2)
      c10 = q.b();
    else if (q.d() == squarefree_core(d1 * d2))
      c11 = q.b();
    else if (q.d() != 0)
      throw FieldMismatchError("QuadExt radicand " + std::to_string(q.d()) +
                               " does not embed in tower (" + std::to_string(d1) + "," +
                               std::to_string(d2) + ")");
    return TowerExt(Rational(q.a()), std::move(c01), std::move(c10), std::move(c11), d1, d2);
  }

  const Rational& c00() const { return c00_; }
  const Rational& c01() const { return c01_; }
  const Rational& c10() const { return c10_; }
  const Rational& c11() const { return c11_; }
  long d1() const { return d1_; }
  long d2() const { return d2_; }

  bool is_zero() const {
    return sgn(c00_) == 0 && sgn(c01_) == 0 && sgn(c10_) == 0 && sgn(c11_) == 0;
  }
  bool is_rational() const { return d1_ == 0 && d2_ == 0; }

  int sign() const {
    if (is_rational()) return sgn(c00_);
    const QuadExt A = part_low();
    const QuadExt B = part_high();
    const int sb = B.sign();
    if (sb == 0) return A.sign();
    const int sa = A.sign();
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    const int snorm = (A * A - B * B * QuadExt(Rational(d2_))).sign();
    if (snorm == 0) return 0;
    return sa * snorm;
  }

  TowerExt operator-() const {
    return TowerExt(-c00_, -c01_, -c10_, -c11_, d1_, d2_);
  }

  friend TowerExt operator+(const TowerExt& x, const TowerExt& y) {
    auto [d1, d2] = unify(x, y);
    return TowerExt(x.c00_ + y.c00_, x.c01_ + y.c01_, x.c10_ + y.c10_, x.c11_ + y.c11_, d1, d2);
  }
  friend TowerExt operator-(const TowerExt& x, const TowerExt& y) { return x + (-y); }
  friend TowerExt operator*(const TowerExt& x, const TowerExt& y) {
    auto [d1, d2] = unify(x, y);
    if (d1 == 0) return TowerExt(x.c00_ * y.c00_);
    const long g = std::gcd(d1, d2);
    const long a = d1 / g, b = d2 / g, e = a * b;
    return TowerExt(
        x.c00_ * y.c00_ + d1 * x.c01_ * y.c01_ + d2 * x.c10_ * y.c10_ + e * x.c11_ * y.c11_,
        x.c00_ * y.c01_ + x.c01_ * y.c00_ + b * (x.c10_ * y.c11_ + x.c11_ * y.c10_),
        x.c00_ * y.c10_ + x.c10_ * y.c00_ + a * (x.c01_ * y.c11_ + x.c11_ * y.c01_),
        x.c00_ * y.c11_ + x.c11_ * y.c00_ + g * (x.c01_ * y.c10_ + x.c10_ * y.c01_), d1, d2);
  }
  friend TowerExt operator/(const TowerExt& x, const TowerExt& y) { return x * y.inverse(); }

  TowerExt& operator+=(const TowerExt& y) { return *this = *this + y; }
  TowerExt& operator-=(const TowerExt& y) { return *this = *this - y; }
  TowerExt& operator*=(const TowerExt& y) { return *this = *this * y; }
  TowerExt& operator/=(const TowerExt& y) { return *this = *this / y; }

  TowerExt inverse() const {
    if (is_zero()) throw std::domain_error("TowerExt division by zero");
    if (is_rational()) return TowerExt(Rational(1) / c00_);
    const QuadExt A = part_low();
    const QuadExt B = part_high();
    // conjugate over Q(sqrt(d1)): (A + B sqrt(d2))(A - B sqrt(d2)) = A^2 - B^2 d2
    const QuadExt N = A * A - B * B * QuadExt(Rational(d2_));
    const QuadExt Ninv = N.inverse();
    const QuadExt Ap = A * Ninv;
    const QuadExt Bp = -(B * Ninv);
    const long g = std::gcd(d1_, d2_);
    return TowerExt(Ap.a(), Ap.b(), Bp.a(), Bp.b() * g, d1_, d2_);
  }

  TowerExt pow(unsigned e) const {
    TowerExt acc(1), base = *this;
    while (e != 0) {
      if (e & 1u) acc *= base;
      base *= base;
      e >>= 1u;
    }
    return acc;
  }

  friend bool operator==(const TowerExt& x, const TowerExt& y) { return (x - y).is_zero(); }
  friend bool operator!=(const TowerExt& x, const TowerExt& y) { return !(x == y); }
  friend bool operator<(const TowerExt& x, const TowerExt& y) { return (x - y).sign() < 0; }
  friend bool operator>(const TowerExt& x, const TowerExt& y) { return (x - y).sign() > 0; }
  friend bool operator<=(const TowerExt& x, const TowerExt& y) { return (x - y).sign() <= 0; }
  friend bool operator>=(const TowerExt& x, const TowerExt& y) { return (x - y).sign() >= 0; }

  double to_double() const {
    if (is_rational()) return c00_.get_d();
    const long e = squarefree_core(d1_ * d2_);
    return c00_.get_d() + c01_.get_d() * std::sqrt(static_cast<double>(d1_)) +
           c10_.get_d() * std::sqrt(static_cast<double>(d2_)) +
           c11_.get_d() * std::sqrt(static_cast<double>(e));
  }

  std::string str() const {
    if (is_rational()) return c00_.get_str();
    const long e = squarefree_core(d1_ * d2_);
    return c00_.get_str() + " + " + c01_.get_str() + "*sqrt(" + std::to_string(d1_) + ") + " +
           c10_.get_str() + "*sqrt(" + std::to_string(d2_) + ") + " + c11_.get_str() +
           "*sqrt(" + std::to_string(e) + ")";
  }

 private:
  // x = part_low() + part_high() * sqrt(d2), both parts in Q(sqrt(d1)).
  QuadExt part_low() const { return QuadExt(c00_, c01_, d1_); }
  QuadExt part_high() const {
    const long g = std::gcd(d1_, d2_);
    return QuadExt(c10_, c11_ / g, d1_);
  }

  static std::pair<long, long> unify(const TowerExt& x, const TowerExt& y) {
    if (x.d1_ == y.d1_ && x.d2_ == y.d2_) return {x.d1_, x.d2_};
    if (x.d1_ == 0 && x.d2_ == 0) return {y.d1_, y.d2_};
    if (y.d1_ == 0 && y.d2_ == 0) return {x.d1_, x.d2_};
    throw FieldMismatchError("tower tag mismatch: (" + std::to_string(x.d1_) + "," +
                             std::to_string(x.d2_) + ") vs (" + std::to_string(y.d1_) + "," +
                             std::to_string(y.d2_) + ")");
  }

  void normalize() {
    if (sgn(c01_) == 0 && sgn(c10_) == 0 && sgn(c11_) == 0) d1_ = d2_ = 0;
  }

  Rational c00_, c01_, c10_, c11_;
  long d1_, d2_;
};

inline int sign_of(const TowerExt& x) { return x.sign(); }
inline TowerExt abs_of(const TowerExt& x) { return x.sign() < 0 ? -x : x; }
inline double to_double(const TowerExt& x) { return x.to_double(); }

inline Integer floor_of(const TowerExt& x) {
  if (x.is_rational()) return floor_of(x.c00());
  const double est = x.to_double();
  Integer f = 0;
  if (std::isfinite(est)) {
    mpz_set_d(f.get_mpz_t(), std::floor(est));
  }
  Integer step = 1;
  while ((x - TowerExt(Rational(f))).sign() < 0) {
    f -= step;
    step *= 2;
  }
  step = 1;
  Integer g = f + 1;
  while ((x - TowerExt(Rational(g))).sign() >= 0) {
    g += step;
    step *= 2;
  }
  while (g - f > 1) {
    Integer mid = f + (g - f) / 2;
    if ((x - TowerExt(Rational(mid))).sign() >= 0)
      f = mid;
    else
      g = mid;
  }
  return f;
}

}  // namespace toraldyn
