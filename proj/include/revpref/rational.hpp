#pragma once

// Exact arbitrary-precision rational arithmetic plus bounded-denominator
// rounding (Stern-Brocot mediant descent). All query-learning code paths
// run on this type end to end; floating point never enters them.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace revpref {

enum class RoundDir { down, up };

// Which endpoint a binary search moved last; decides the rounding direction
// applied to the final midpoint.
enum class SearchFlag { last_move_raised_lo, last_move_lowered_hi };

class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}  // NOLINT: implicit by design, mirrors int->Q
  Rational(long num, long den);
  explicit Rational(const mpz_class& n) : v_(n) {}
  Rational(const mpz_class& num, const mpz_class& den);

  // Parses "p/q" or "p". Throws std::invalid_argument on garbage or q == 0.
  static Rational from_string(std::string_view s);
  // Exact value of an IEEE double (doubles are dyadic rationals).
  static Rational from_double(double d);
  // 2^e for any sign of e.
  static Rational pow2(long e);

  const mpz_class& num() const { return v_.get_num(); }
  const mpz_class& den() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  // max(bits(|num|), bits(den)); bits(0) = 0, so bit_length(0) = 1 from the
  // denominator. Matches "size" of a rational as used by the learners.
  std::size_t bit_length() const;

  double to_double() const { return v_.get_d(); }
  // Always the explicit two-part form, e.g. "3/1".
  std::string str() const;

  mpz_class floor() const;
  mpz_class ceil() const;
  Rational abs() const;
  Rational reciprocal() const;

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return mpq_equal(a.v_.get_mpq_t(), b.v_.get_mpq_t()) != 0;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = mpq_cmp(a.v_.get_mpq_t(), b.v_.get_mpq_t());
    return c <=> 0;
  }

 private:
  explicit Rational(mpq_class q) : v_(std::move(q)) {}
  mpq_class v_;  // canonical: den > 0, gcd(|num|, den) = 1
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

// Nearest rational with denominator <= max_den on the requested side of x:
// result <= x for RoundDir::down, result >= x for RoundDir::up. Exact
// Stern-Brocot mediant descent with run compression; never touches floats.
// Requires x >= 0 and max_den >= 1.
Rational round_to_denominator(const Rational& x, const mpz_class& max_den,
                              RoundDir dir);

// Final step of a bisection: rounds the midpoint (lo+hi)/2 toward the side
// the last move came from (raised lo -> round up, lowered hi -> round down).
Rational rational_from_binary_search(const Rational& lo, const Rational& hi,
                                     const mpz_class& max_den, SearchFlag flag);

// Iterations that shrink a [0, upper] bisection below 1/max_den^2, so at most
// one rational with denominator <= max_den survives in the bracket: the
// smallest i with 2^i > upper * max_den^2.
int bisection_iterations(const Rational& upper, const mpz_class& max_den);

}  // namespace revpref
