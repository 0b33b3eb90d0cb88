#pragma once

// Exact arithmetic in real quadratic extensions Q(sqrt(d)).
//
// A value is a + b*sqrt(d) with rational a, b and squarefree d >= 2.
// Normal form: when b == 0 the value is rational and d is reset to 0, so a
// rational value carries no field tag and combines freely with values from
// any Q(sqrt(d)).  Mixing two genuinely irrational values with different d
// is a programming error and throws FieldMismatchError.
//
// Signs are decided exactly by case analysis: if a and b agree in sign the
// answer is immediate; otherwise compare a^2 against b^2*d (i.e. the sign
// of the field norm), which settles which magnitude wins.

#include <cmath>
#include <string>

#include "toraldyn/rational.hpp"

namespace toraldyn {

class QuadExt {
 public:
  QuadExt() : a_(0), b_(0), d_(0) {}
  QuadExt(long v) : a_(v), b_(0), d_(0) {}          // NOLINT(runtime/explicit)
  QuadExt(const Rational& a) : a_(a), b_(0), d_(0) {}  // NOLINT(runtime/explicit)
  QuadExt(Rational a, Rational b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    if (d_ != 0 && (d_ < 2 || squarefree_core(d_) != d_))
      throw FieldMismatchError("QuadExt radicand must be squarefree >= 2, got " +
                               std::to_string(d_));
    normalize();
  }

  // sqrt(n) for any positive integer n, extracting the square part.
  static QuadExt sqrt_of(long n) {
    if (n < 0) throw FieldMismatchError("sqrt_of negative integer");
    if (n == 0) return QuadExt();
    long core = squarefree_core(n);
    long scale = square_scale_of(n);
    if (core == 1) return QuadExt(Rational(scale));
    return QuadExt(Rational(0), Rational(scale), core);
  }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  long d() const { return d_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const { return d_ == 0; }

  int sign() const {
    const int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    const int snorm = sgn(norm());
    if (snorm == 0) return 0;
    return sa * snorm;
  }

  // Field norm a^2 - b^2 d (product with the conjugate).
  Rational norm() const { return a_ * a_ - b_ * b_ * d_; }
  QuadExt conj() const { return QuadExt(a_, -b_, d_); }

  QuadExt operator-() const { return QuadExt(-a_, -b_, d_); }

  friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a_ + y.a_, x.b_ + y.b_, unify(x.d_, y.d_));
  }
  friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
    return QuadExt(x.a_ - y.a_, x.b_ - y.b_, unify(x.d_, y.d_));
  }
  friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
    const long d = unify(x.d_, y.d_);
    return QuadExt(x.a_ * y.a_ + x.b_ * y.b_ * d, x.a_ * y.b_ + x.b_ * y.a_, d);
  }
  friend QuadExt operator/(const QuadExt& x, const QuadExt& y) { return x * y.inverse(); }

  QuadExt& operator+=(const QuadExt& y) { return *this = *this + y; }
  QuadExt& operator-=(const QuadExt& y) { return *this = *this - y; }
  QuadExt& operator*=(const QuadExt& y) { return *this = *this * y; }
  QuadExt& operator/=(const QuadExt& y) { return *this = *this / y; }

  QuadExt inverse() const {
    if (is_zero()) throw std::domain_error("QuadExt division by zero");
    if (d_ == 0) return QuadExt(Rational(1) / a_);
    const Rational n = norm();  // nonzero: sqrt(d) is irrational
    return QuadExt(a_ / n, -b_ / n, d_);
  }

  QuadExt pow(unsigned e) const {
    QuadExt acc(1), base = *this;
    while (e != 0) {
      if (e & 1u) acc *= base;
      base *= base;
      e >>= 1u;
    }
    return acc;
  }

  friend bool operator==(const QuadExt& x, const QuadExt& y) {
    return (x - y).is_zero();
  }
  friend bool operator!=(const QuadExt& x, const QuadExt& y) { return !(x == y); }
  friend bool operator<(const QuadExt& x, const QuadExt& y) { return (x - y).sign() < 0; }
  friend bool operator>(const QuadExt& x, const QuadExt& y) { return (x - y).sign() > 0; }
  friend bool operator<=(const QuadExt& x, const QuadExt& y) { return (x - y).sign() <= 0; }
  friend bool operator>=(const QuadExt& x, const QuadExt& y) { return (x - y).sign() >= 0; }

  double to_double() const {
    return a_.get_d() + b_.get_d() * std::sqrt(static_cast<double>(d_));
  }

  std::string str() const {
    if (d_ == 0) return a_.get_str();
    return a_.get_str() + " + " + b_.get_str() + "*sqrt(" + std::to_string(d_) + ")";
  }

 private:
  static long unify(long x, long y) {
    if (x == y) return x;
    if (x == 0) return y;
    if (y == 0) return x;
    throw FieldMismatchError("QuadExt radicand mismatch: " + std::to_string(x) + " vs " +
                             std::to_string(y));
  }

  void normalize() {
    if (sgn(b_) == 0) d_ = 0;
  }

  Rational a_, b_;
  long d_;
};

inline int sign_of(const QuadExt& x) { return x.sign(); }
inline QuadExt abs_of(const QuadExt& x) { return x.sign() < 0 ? -x : x; }
inline double to_double(const QuadExt& x) { return x.to_double(); }
inline double to_double(const Rational& x) { return x.get_d(); }

inline Integer floor_of(const QuadExt& x) {
  if (x.is_rational()) return floor_of(x.a());
  const double est = x.to_double();
  Integer f = 0;
  if (std::isfinite(est)) {
    mpz_set_d(f.get_mpz_t(), std::floor(est));
  }
  Integer step = 1;
  while ((x - QuadExt(Rational(f))).sign() < 0) {
    f -= step;
    step *= 2;
  }
  step = 1;
  Integer g = f + 1;
  while ((x - QuadExt(Rational(g))).sign() >= 0) {
    g += step;
    step *= 2;
  }
  // invariant: f <= x < g
  while (g - f > 1) {
    Integer mid = f + (g - f) / 2;
    if ((x - QuadExt(Rational(mid))).sign() >= 0)
      f = mid;
    else
      g = mid;
  }
  return f;
}

// Dyadic bracket: returns r with r <= x < r + 2^-bits (lower=true),
// or r - 2^-bits < x <= r (lower=false).  Exact.
inline Rational dyadic_below(const QuadExt& x, unsigned bits) {
  Integer scaled = floor_of(x * QuadExt(Rational(Integer(1) << bits)));
  return Rational(scaled) / Rational(Integer(1) << bits);
}
inline Rational dyadic_above(const QuadExt& x, unsigned bits) {
  return dyadic_below(x, bits) + Rational(1, 1) / Rational(Integer(1) << bits);
}

}  // namespace toraldyn
