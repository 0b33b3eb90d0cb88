#pragma once

// Field-of-computation selection.  Single-map geometry lives in Q(sqrt(D));
// two-map geometry lives in the compositum of both quadratic fields, which
// is either the same quadratic field (when the discriminant cores agree —
// eager collapse, TowerExt never constructed) or a genuine biquadratic
// tower.  Pipelines pick the scalar type K once from the tag and promote
// all quadratic inputs into K up front.

#include <array>

#include "toraldyn/quadext.hpp"
#include "toraldyn/rational.hpp"
#include "toraldyn/towerext.hpp"

namespace toraldyn {

struct FieldTag {
  long d1 = 0, d2 = 0;
  bool degenerate() const { return d1 == d2; }
};

inline FieldTag compositum(long da, long db) {
  if (da > db) std::swap(da, db);
  return FieldTag{da, db};
}

template <class K>
K promote_quad(const QuadExt& q, const FieldTag& tag);

template <>
inline QuadExt promote_quad<QuadExt>(const QuadExt& q, const FieldTag& tag) {
  if (!tag.degenerate())
    throw FieldMismatchError("QuadExt pipeline with non-degenerate tower tag");
  if (q.d() != 0 && q.d() != tag.d1)
    throw FieldMismatchError("QuadExt radicand does not match pipeline field");
  return q;
}

template <>
inline TowerExt promote_quad<TowerExt>(const QuadExt& q, const FieldTag& tag) {
  if (tag.degenerate())
    throw FieldMismatchError("TowerExt pipeline with degenerate tag: use QuadExt");
  return TowerExt::embed(q, tag.d1, tag.d2);
}

// Rational coordinate vector over the field's Q-basis, for exact linear
// solves (dimension 2 for QuadExt, 4 for TowerExt).
template <class K>
struct FieldTraits;

template <>
struct FieldTraits<QuadExt> {
  static constexpr int dim = 2;
  static std::array<Rational, 4> coords(const QuadExt& x) {
    return {x.a(), x.b(), Rational(0), Rational(0)};
  }
};

template <>
struct FieldTraits<TowerExt> {
  static constexpr int dim = 4;
  static std::array<Rational, 4> coords(const TowerExt& x) {
    return {x.c00(), x.c01(), x.c10(), x.c11()};
  }
};

}  // namespace toraldyn
