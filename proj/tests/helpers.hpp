#pragma once

// Shared test utilities: seeded randomness and the certified interval
// oracle used to cross-check exact predicates.

#include <optional>
#include <random>

#include "toraldyn/interval.hpp"
#include "toraldyn/quadext.hpp"
#include "toraldyn/rational.hpp"
#include "toraldyn/towerext.hpp"

namespace testutil {

using toraldyn::MpfrInterval;
using toraldyn::QuadExt;
using toraldyn::Rational;
using toraldyn::TowerExt;

inline std::mt19937_64 make_rng(unsigned seed) { return std::mt19937_64(seed); }

inline Rational rand_rational(std::mt19937_64& rng, long max_abs_num = 50,
                              long max_den = 40) {
  std::uniform_int_distribution<long> num(-max_abs_num, max_abs_num);
  std::uniform_int_distribution<long> den(1, max_den);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline QuadExt rand_quad(std::mt19937_64& rng, long d) {
  return QuadExt(rand_rational(rng), rand_rational(rng), d);
}

inline TowerExt rand_tower(std::mt19937_64& rng, long d1, long d2) {
  return TowerExt(rand_rational(rng), rand_rational(rng), rand_rational(rng),
                  rand_rational(rng), d1, d2);
}

// Certified sign at the given precision; nullopt when the interval straddles
// zero without being exactly zero.
template <class K>
std::optional<int> oracle_sign(const K& x, mpfr_prec_t prec = 300) {
  return MpfrInterval::eval(x, prec).sign();
}

}  // namespace testutil
