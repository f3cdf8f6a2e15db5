#pragma once

// The four buyer utility classes and their evaluation. Parameters are exact
// rationals; evaluation is exact for linear/SPLC/Leontief on rational bundles
// and floating point for CES (fractional powers).

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "revpref/types.hpp"

namespace revpref {

struct LinearUtility {
  std::vector<Rational> a;  // non-negative, sums to 1
  int n_bits = 0;           // size bound carried by the pre-normalized draw
  int dim() const { return static_cast<int>(a.size()); }
};

struct SPLCUtility {
  // Per-good segments, slopes strictly decreasing within a good; a missing
  // length means the last segment extends to infinity.
  struct Segment {
    Rational slope;
    std::optional<Rational> length;
  };
  std::vector<std::vector<Segment>> goods;
  int n_bits = 0;
  int dim() const { return static_cast<int>(goods.size()); }
  int max_segments() const;
};

struct CESUtility {
  std::vector<Rational> a;  // non-negative, sums to 1
  double rho = 0.5;         // -inf < rho <= 1, rho != 0 (0 rejected)
  int n_bits = 0;
  int dim() const { return static_cast<int>(a.size()); }
};

struct LeontiefUtility {
  std::vector<Rational> a;  // non-negative, sums to 1
  int n_bits = 0;
  int dim() const { return static_cast<int>(a.size()); }
};

using Utility = std::variant<LinearUtility, SPLCUtility, CESUtility, LeontiefUtility>;

enum class UtilityClass { linear, splc, ces, leontief };

std::string class_name(UtilityClass c);
UtilityClass class_from_name(const std::string& name);
UtilityClass class_of(const Utility& u);
int utility_dim(const Utility& u);

// Throws std::invalid_argument if class invariants are violated (dimension,
// normalization, slope monotonicity, rho = 0, ...).
void validate(const LinearUtility& u);
void validate(const SPLCUtility& u);
void validate(const CESUtility& u);
void validate(const LeontiefUtility& u);
void validate(const Utility& u);

template <class S>
S eval(const LinearUtility& u, const BundleT<S>& x);

template <class S>
S eval(const SPLCUtility& u, const BundleT<S>& x);

// min over goods with a_j > 0 of x_j / a_j; goods with a_j = 0 contribute
// "0/0 = infinity" and are excluded from the min.
template <class S>
S eval(const LeontiefUtility& u, const BundleT<S>& x);

double eval(const CESUtility& u, const Bundle& x);

double eval(const Utility& u, const Bundle& x);
// Exact evaluation; throws for CES.
Rational eval_exact(const Utility& u, const BundleQ& x);

// Random instances whose pre-normalization parameters have numerator and
// denominator below 2^n. Linear draws integer weights over a common
// denominator so every pairwise ratio a_j/a_1 again has size <= n (the
// query learner's rounding step needs exactly that).
LinearUtility random_linear(int d, int n_bits, std::mt19937_64& rng);
SPLCUtility random_splc(int d, int kappa, int n_bits, std::mt19937_64& rng);
CESUtility random_ces(int d, int n_bits, std::mt19937_64& rng);
LeontiefUtility random_leontief(int d, int n_bits, std::mt19937_64& rng);

Utility random_utility(UtilityClass c, int d, int kappa, int n_bits,
                       std::uint64_t seed);

}  // namespace revpref
