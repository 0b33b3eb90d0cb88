#pragma once

// Certified interval arithmetic on MPFR floats with directed rounding.
// Used only as an oracle (tests, cross-checks) and for rendering output;
// no geometric predicate in the library ever consumes these intervals.

#include <mpfr.h>

#include <optional>
#include <string>

#include "toraldyn/quadext.hpp"
#include "toraldyn/rational.hpp"
#include "toraldyn/towerext.hpp"

namespace toraldyn {

class MpfrInterval {
 public:
  explicit MpfrInterval(mpfr_prec_t prec = 128) : prec_(prec) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }
  MpfrInterval(const MpfrInterval& o) : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  MpfrInterval& operator=(const MpfrInterval& o) {
    if (this != &o) {
      mpfr_set_prec(lo_, o.prec_);
      mpfr_set_prec(hi_, o.prec_);
      prec_ = o.prec_;
      mpfr_set(lo_, o.lo_, MPFR_RNDD);
      mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
  }
  ~MpfrInterval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  static MpfrInterval from_rational(const Rational& q, mpfr_prec_t prec) {
    MpfrInterval r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  static MpfrInterval sqrt_of_long(long n, mpfr_prec_t prec) {
    MpfrInterval r(prec);
    mpfr_sqrt_ui(r.lo_, static_cast<unsigned long>(n), MPFR_RNDD);
    mpfr_sqrt_ui(r.hi_, static_cast<unsigned long>(n), MPFR_RNDU);
    return r;
  }

  friend MpfrInterval operator+(const MpfrInterval& x, const MpfrInterval& y) {
    MpfrInterval r(x.prec_);
    mpfr_add(r.lo_, x.lo_, y.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, x.hi_, y.hi_, MPFR_RNDU);
    return r;
  }
  friend MpfrInterval operator-(const MpfrInterval& x, const MpfrInterval& y) {
    MpfrInterval r(x.prec_);
    mpfr_sub(r.lo_, x.lo_, y.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, x.hi_, y.lo_, MPFR_RNDU);
    return r;
  }
  friend MpfrInterval operator*(const MpfrInterval& x, const MpfrInterval& y) {
    MpfrInterval r(x.prec_);
    mpfr_t t;
    mpfr_init2(t, x.prec_);
    bool first = true;
    const mpfr_srcptr xs[2] = {x.lo_, x.hi_};
    const mpfr_srcptr ys[2] = {y.lo_, y.hi_};
    for (auto xv : xs)
      for (auto yv : ys) {
        mpfr_mul(t, xv, yv, MPFR_RNDD);
        if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
        mpfr_mul(t, xv, yv, MPFR_RNDU);
        if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    mpfr_clear(t);
    return r;
  }

  MpfrInterval operator-() const {
    MpfrInterval r(prec_);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
  }

  bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

  // +1 / -1 when the interval is strictly one-signed, 0 when it is exactly
  // the point zero, nullopt when inconclusive.
  std::optional<int> sign() const {
    if (mpfr_sgn(lo_) > 0) return 1;
    if (mpfr_sgn(hi_) < 0) return -1;
    if (mpfr_zero_p(lo_) && mpfr_zero_p(hi_)) return 0;
    return std::nullopt;
  }

  double mid_double() const {
    mpfr_t m;
    mpfr_init2(m, prec_);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_ui(m, m, 2, MPFR_RNDN);
    double d = mpfr_get_d(m, MPFR_RNDN);
    mpfr_clear(m);
    return d;
  }

  std::string mid_decimal(int significant_digits) const {
    mpfr_t m;
    mpfr_init2(m, prec_);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_ui(m, m, 2, MPFR_RNDN);
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Rg", significant_digits, m);
    std::string out(s);
    mpfr_free_str(s);
    mpfr_clear(m);
    return out;
  }

  static MpfrInterval eval(const Rational& q, mpfr_prec_t prec) {
    return from_rational(q, prec);
  }
  static MpfrInterval eval(const QuadExt& x, mpfr_prec_t prec) {
    MpfrInterval r = from_rational(x.a(), prec);
    if (x.d() != 0) r = r + from_rational(x.b(), prec) * sqrt_of_long(x.d(), prec);
    return r;
  }
  static MpfrInterval eval(const TowerExt& x, mpfr_prec_t prec) {
    MpfrInterval r = from_rational(x.c00(), prec);
    if (!x.is_rational()) {
      const long e = squarefree_core(x.d1() * x.d2());
      r = r + from_rational(x.c01(), prec) * sqrt_of_long(x.d1(), prec);
      r = r + from_rational(x.c10(), prec) * sqrt_of_long(x.d2(), prec);
      r = r + from_rational(x.c11(), prec) * sqrt_of_long(e, prec);
    }
    return r;
  }

 private:
  mpfr_t lo_, hi_;
  mpfr_prec_t prec_;
};

}  // namespace toraldyn
