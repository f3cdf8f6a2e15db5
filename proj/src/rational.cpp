#include "revpref/rational.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace revpref {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  v_ = mpq_class(num) / mpq_class(den);
}

Rational Rational::from_string(std::string_view s) {
  mpq_class q;
  if (q.set_str(std::string(s), 10) != 0)
    throw std::invalid_argument("Rational: cannot parse '" + std::string(s) + "'");
  if (q.get_den() == 0) throw std::invalid_argument("Rational: zero denominator");
  q.canonicalize();
  return Rational(std::move(q));
}

Rational Rational::from_double(double d) {
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), d);
  return Rational(std::move(q));
}

Rational Rational::pow2(long e) {
  mpz_class p = 1;
  p <<= static_cast<unsigned long>(e >= 0 ? e : -e);
  return e >= 0 ? Rational(p) : Rational(mpz_class(1), p);
}

std::size_t Rational::bit_length() const {
  auto bits = [](const mpz_class& z) -> std::size_t {
    if (z == 0) return 0;
    return mpz_sizeinbase(z.get_mpz_t(), 2);
  };
  return std::max(bits(v_.get_num()), bits(v_.get_den()));
}

std::string Rational::str() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

mpz_class Rational::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
  return q;
}

mpz_class Rational::ceil() const {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
  return q;
}

Rational Rational::abs() const {
  return sign() < 0 ? -*this : *this;
}

Rational Rational::reciprocal() const {
  if (is_zero()) throw std::domain_error("Rational: reciprocal of zero");
  return Rational(mpq_class(1) / v_);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  v_ /= o.v_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.str();
}

Rational round_to_denominator(const Rational& x, const mpz_class& max_den,
                              RoundDir dir) {
  if (max_den < 1) throw std::invalid_argument("round_to_denominator: max_den < 1");
  if (x.sign() < 0) throw std::domain_error("round_to_denominator: negative input");
  if (x.den() <= max_den) return x;  // already representable; idempotent

  // Split off the integer part; the walk runs on f = p/q in (0,1).
  mpz_class w = x.floor();
  mpz_class p = x.num() - w * x.den();
  const mpz_class& q = x.den();

  // Stern-Brocot frame a/b < f < c/d with bc - ad = 1. Runs of left/right
  // mediant steps are taken in one shot; every fraction the frame visits is
  // in lowest terms, so f itself (q > max_den) is never hit.
  mpz_class a = 0, b = 1, c = 1, d = 1;
  while (b + d <= max_den) {
    mpz_class r = p * b - a * q;  // >0:  f - a/b, scaled
    mpz_class s = c * q - p * d;  // >0:  c/d - f, scaled
    if (r > s) {
      // f above the mediant: push the lower endpoint right.
      mpz_class k = std::min(mpz_class((r - 1) / s), mpz_class((max_den - b) / d));
      a += k * c;
      b += k * d;
    } else if (r < s) {
      mpz_class k = std::min(mpz_class((s - 1) / r), mpz_class((max_den - d) / b));
      c += k * a;
      d += k * b;
    } else {
      throw std::logic_error("round_to_denominator: reduced fraction hit a mediant");
    }
  }

  // a/b is the best approximation from below, c/d from above: the frame is
  // Farey-adjacent, so nothing with denominator <= max_den fits in between.
  if (dir == RoundDir::down) return Rational(w * b + a, b);
  return Rational(w * d + c, d);
}

Rational rational_from_binary_search(const Rational& lo, const Rational& hi,
                                     const mpz_class& max_den, SearchFlag flag) {
  if (lo > hi) throw std::invalid_argument("rational_from_binary_search: lo > hi");
  Rational mid = (lo + hi) / Rational(2);
  RoundDir dir =
      flag == SearchFlag::last_move_raised_lo ? RoundDir::up : RoundDir::down;
  return round_to_denominator(mid, max_den, dir);
}

int bisection_iterations(const Rational& upper, const mpz_class& max_den) {
  Rational bound = upper * Rational(max_den) * Rational(max_den);
  int i = 0;
  Rational pw(1);
  while (pw <= bound) {
    pw *= Rational(2);
    ++i;
  }
  return i;
}

}  // namespace revpref
