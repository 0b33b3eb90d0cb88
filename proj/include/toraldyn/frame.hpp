#pragma once

// Linear frames with two independent columns (1, s0) and (1, s1).  Frame
// coordinates (u, w) of a plane point p satisfy p = u*(1,s0) + w*(1,s1).
//
// The main instance is the eigenframe of a hyperbolic automorphism, where
// column 0 spans the expanding line and column 1 the contracting line; the
// map then acts diagonally on frame coordinates.  Mixed frames pairing the
// contracting directions of two different maps are used for transversal
// intersection problems and may require the biquadratic scalar type.

#include <optional>

#include "toraldyn/automorphism.hpp"
#include "toraldyn/field.hpp"
#include "toraldyn/matrix2.hpp"

namespace toraldyn {

template <class K>
struct Frame {
  K s0, s1;      // column slopes, s0 != s1
  K inv_den;     // 1 / (s1 - s0)

  static Frame from_slopes(const K& s0, const K& s1) {
    if (s0 == s1) throw InvariantViolation("frame columns are parallel");
    Frame f;
    f.s0 = s0;
    f.s1 = s1;
    f.inv_den = K(1) / (s1 - s0);
    return f;
  }

  // p = u*(1,s0) + w*(1,s1)  =>  u + w = x,  s0*u + s1*w = y.
  Vec2<K> to_frame(const Vec2<K>& p) const {
    return {(s1 * p.x - p.y) * inv_den, (p.y - s0 * p.x) * inv_den};
  }
  Vec2<K> from_frame(const Vec2<K>& c) const {
    return {c.x + c.y, s0 * c.x + s1 * c.y};
  }
  Vec2<K> lattice_coords(const IntVec2& k) const {
    return to_frame({K(Rational(k.x)), K(Rational(k.y))});
  }
  Vec2<K> promote_point(const RatVec2& p) const { return {K(p.x), K(p.y)}; }
};

// Eigenframe of an analyzed automorphism: u expands by lambda_plus, w
// contracts by lambda_minus.
template <class K>
Frame<K> eigenframe(const ToralAuto& A, const FieldTag& tag) {
  return Frame<K>::from_slopes(promote_quad<K>(A.slope_plus, tag),
                               promote_quad<K>(A.slope_minus, tag));
}

// Exact integer test across the field tower: the value as an Integer when
// all irrational basis coordinates vanish and the rational part is integral.
template <class K>
std::optional<Integer> integer_value(const K& x) {
  const auto c = FieldTraits<K>::coords(x);
  for (int i = 1; i < 4; ++i)
    if (sgn(c[i]) != 0) return std::nullopt;
  if (c[0].get_den() != 1) return std::nullopt;
  return Integer(c[0].get_num());
}

}  // namespace toraldyn
