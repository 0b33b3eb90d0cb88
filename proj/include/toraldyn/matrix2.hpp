#pragma once

// Small dense 2x2 integer matrices and 2-vectors.  Matrix entries are
// arbitrary-precision: high powers (tube depths, avoidance horizons) are
// taken of matrices whose entries grow like lambda^n.

#include <string>

#include "toraldyn/rational.hpp"

namespace toraldyn {

template <class K>
struct Vec2 {
  K x{}, y{};

  friend Vec2 operator+(const Vec2& p, const Vec2& q) { return {p.x + q.x, p.y + q.y}; }
  friend Vec2 operator-(const Vec2& p, const Vec2& q) { return {p.x - q.x, p.y - q.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  friend Vec2 operator*(const K& s, const Vec2& p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Vec2& p, const Vec2& q) { return p.x == q.x && p.y == q.y; }
};

using RatVec2 = Vec2<Rational>;

struct IntVec2 {
  Integer x{0}, y{0};
  friend bool operator==(const IntVec2& p, const IntVec2& q) {
    return p.x == q.x && p.y == q.y;
  }
  friend IntVec2 operator+(const IntVec2& p, const IntVec2& q) {
    return {p.x + q.x, p.y + q.y};
  }
  IntVec2 operator-() const { return {-x, -y}; }
};

struct IntMat2 {
  // [[m00, m01], [m10, m11]]
  Integer m00{1}, m01{0}, m10{0}, m11{1};

  static IntMat2 identity() { return IntMat2{}; }

  Integer det() const { return m00 * m11 - m01 * m10; }
  Integer trace() const { return m00 + m11; }
  IntMat2 adjugate() const { return {m11, -m01, -m10, m00}; }

  // Inverse of a matrix with det = ±1 (integer entries).
  IntMat2 unimodular_inverse() const {
    const Integer dt = det();
    if (dt == 1) return adjugate();
    if (dt == -1) {
      IntMat2 a = adjugate();
      return {-a.m00, -a.m01, -a.m10, -a.m11};
    }
    throw std::domain_error("matrix is not unimodular");
  }

  friend IntMat2 operator*(const IntMat2& A, const IntMat2& B) {
    return {A.m00 * B.m00 + A.m01 * B.m10, A.m00 * B.m01 + A.m01 * B.m11,
            A.m10 * B.m00 + A.m11 * B.m10, A.m10 * B.m01 + A.m11 * B.m11};
  }

  IntMat2 pow(unsigned e) const {
    IntMat2 acc = identity(), base = *this;
    while (e != 0) {
      if (e & 1u) acc = acc * base;
      base = base * base;
      e >>= 1u;
    }
    return acc;
  }

  template <class K>
  Vec2<K> apply(const Vec2<K>& v) const {
    return {K(Rational(m00)) * v.x + K(Rational(m01)) * v.y,
            K(Rational(m10)) * v.x + K(Rational(m11)) * v.y};
  }

  friend bool operator==(const IntMat2& A, const IntMat2& B) {
    return A.m00 == B.m00 && A.m01 == B.m01 && A.m10 == B.m10 && A.m11 == B.m11;
  }

  std::string str() const {
    return "[[" + m00.get_str() + "," + m01.get_str() + "],[" + m10.get_str() + "," +
           m11.get_str() + "]]";
  }
};

}  // namespace toraldyn
