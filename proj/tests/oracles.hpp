#pragma once

// Brute-force reference oracles used by the test suites only. Everything in
// here is deliberately naive: enumeration and grid search, independent of the
// library's algorithmic code paths, so the two can check each other.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "revpref/rational.hpp"

namespace revpref::testing {

// Largest rational with denominator <= max_den that is <= x (dir = down), or
// smallest >= x (dir = up), found by scanning every denominator.
inline Rational enumerate_round(const Rational& x, long max_den, RoundDir dir) {
  std::optional<Rational> best;
  for (long q = 1; q <= max_den; ++q) {
    Rational cand = dir == RoundDir::down
                        ? Rational((x * Rational(q)).floor(), mpz_class(q))
                        : Rational((x * Rational(q)).ceil(), mpz_class(q));
    if (!best) {
      best = cand;
      continue;
    }
    if (dir == RoundDir::down ? cand > *best : cand < *best) best = cand;
  }
  return *best;
}

// All distinct rationals with denominator <= max_den inside [lo, hi].
inline std::vector<Rational> enumerate_in_window(const Rational& lo,
                                                 const Rational& hi,
                                                 long max_den) {
  std::vector<Rational> out;
  for (long q = 1; q <= max_den; ++q) {
    mpz_class p = (lo * Rational(q)).ceil();
    for (Rational r(p, mpz_class(q)); r <= hi; p += 1, r = Rational(p, mpz_class(q))) {
      if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    }
  }
  return out;
}

// Uniform random rational with numerator in [0, num_max] and denominator in
// [1, den_max]; reduced by construction.
inline Rational random_rational(std::mt19937_64& rng, long num_max, long den_max) {
  std::uniform_int_distribution<long> num(0, num_max);
  std::uniform_int_distribution<long> den(1, den_max);
  return Rational(num(rng), den(rng));
}

}  // namespace revpref::testing
