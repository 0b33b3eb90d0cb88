#pragma once

// Arbitrary-precision integers and rationals, backed by GMP.
// Rational is always kept in canonical form (gcd(num, den) = 1, den > 0);
// mpq_class guarantees this for arithmetic results, and every entry point
// that builds a value from raw parts canonicalizes explicitly.

#include <gmpxx.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace toraldyn {

using Integer = mpz_class;
using Rational = mpq_class;

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class FieldMismatchError : public std::logic_error {
 public:
  explicit FieldMismatchError(const std::string& what) : std::logic_error(what) {}
};

inline int sign_of(const Rational& q) { return sgn(q); }
inline int sign_of(const Integer& n) { return sgn(n); }

inline Integer floor_of(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return f;
}

inline Rational fractional_part(const Rational& q) { return q - Rational(floor_of(q)); }

inline Rational abs_of(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// Parses "p/q" or "p" (decimal digits, optional leading '-').
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational literal");
  Rational q;
  if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
    throw ParseError("bad rational literal: " + text);
  if (sgn(q.get_den()) == 0) throw ParseError("zero denominator: " + text);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }
inline std::string to_string(const Integer& n) { return n.get_str(); }

// Largest squarefree divisor d of |n| with |n| = d * s^2.  core_of(0) = 0.
inline long squarefree_core(long n) {
  if (n < 0) n = -n;
  if (n == 0) return 0;
  long core = 1;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e % 2 == 1) core *= p;
  }
  return core * n;  // leftover n is prime (or 1)
}

// |n| = core * square_scale^2 with core squarefree.
inline long square_scale_of(long n) {
  if (n < 0) n = -n;
  if (n == 0) return 0;
  long core = squarefree_core(n);
  long s2 = n / core;
  long s = 1;
  while (s * s < s2) ++s;
  return s;
}

}  // namespace toraldyn
