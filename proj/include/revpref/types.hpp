#pragma once

// Shared market-domain types. Demand computations run either on exact
// rationals (query learners) or on doubles (statistical learners); the
// scalar is a template parameter throughout.

#include <span>
#include <vector>

#include "revpref/rational.hpp"

namespace revpref {

template <class S>
using BundleT = std::vector<S>;

using Bundle = BundleT<double>;
using BundleQ = BundleT<Rational>;

template <class S>
struct PriceBudgetT {
  std::vector<S> prices;  // strictly positive
  S budget;               // > 0
};

using PriceBudget = PriceBudgetT<double>;
using PriceBudgetQ = PriceBudgetT<Rational>;

// Bundle domain. The statistical setting lives in [0,1]^d; the SPLC query
// setting needs unbounded amounts (last segments have infinite length).
enum class Domain { unit_cube, nonnegative };

template <class S>
S to_scalar(const Rational& r);

template <>
inline double to_scalar<double>(const Rational& r) { return r.to_double(); }

template <>
inline Rational to_scalar<Rational>(const Rational& r) { return r; }

template <class S>
S dot(std::span<const S> a, std::span<const S> b) {
  S acc{0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class S>
S dot(const std::vector<S>& a, const std::vector<S>& b) {
  return dot(std::span<const S>(a), std::span<const S>(b));
}

}  // namespace revpref
