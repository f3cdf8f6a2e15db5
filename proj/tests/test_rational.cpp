#include <doctest.h>

#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "revpref/rational.hpp"

using namespace revpref;
using revpref::testing::enumerate_in_window;
using revpref::testing::enumerate_round;
using revpref::testing::random_rational;

TEST_CASE("rational construction keeps canonical form") {
  Rational r(6, -4);
  CHECK(r.num() == -3);
  CHECK(r.den() == 2);
  CHECK(r.str() == "-3/2");
  CHECK(Rational(0, 7) == Rational(0));
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);

  CHECK(Rational::from_string("7/10") == Rational(7, 10));
  CHECK(Rational::from_string("-3") == Rational(-3));
  CHECK_THROWS_AS(Rational::from_string("x/y"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::from_string("1/0"), std::invalid_argument);
}

TEST_CASE("rational arithmetic and ordering") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == b);
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(a > b);
  CHECK(-a < b);
  CHECK(Rational(5, 10) == Rational(1, 2));
  CHECK_THROWS_AS(a / Rational(0), std::domain_error);
  CHECK(Rational(7, 2).floor() == 3);
  CHECK(Rational(7, 2).ceil() == 4);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(-1, 2).abs() == Rational(1, 2));
}

TEST_CASE("bit_length and pow2") {
  CHECK(Rational(1).bit_length() == 1);
  CHECK(Rational(0).bit_length() == 1);  // den = 1 contributes one bit
  CHECK(Rational(7, 10).bit_length() == 4);
  CHECK(Rational::pow2(5) == Rational(32));
  CHECK(Rational::pow2(-3) == Rational(1, 8));
}

TEST_CASE("from_double is exact for dyadics") {
  CHECK(Rational::from_double(0.5) == Rational(1, 2));
  CHECK(Rational::from_double(0.375) == Rational(3, 8));
  double x = 0.1;
  // not 1/10, but converting back must reproduce the same double bit pattern
  CHECK(Rational::from_double(x).to_double() == x);
}

TEST_CASE("round_to_denominator: pinned examples") {
  CHECK(round_to_denominator(Rational(3, 4), 4, RoundDir::down) == Rational(3, 4));
  CHECK(round_to_denominator(Rational(3, 4), 4, RoundDir::up) == Rational(3, 4));
  // frozen from the enumeration oracle over q <= 3
  CHECK(enumerate_round(Rational(7, 10), 3, RoundDir::down) == Rational(2, 3));
  CHECK(round_to_denominator(Rational(7, 10), 3, RoundDir::down) == Rational(2, 3));
  CHECK(enumerate_round(Rational(7, 10), 3, RoundDir::up) == Rational(1, 1));
  CHECK(round_to_denominator(Rational(7, 10), 3, RoundDir::up) == Rational(1));

  CHECK_THROWS_AS(round_to_denominator(Rational(-1, 2), 4, RoundDir::down),
                  std::domain_error);
  CHECK_THROWS_AS(round_to_denominator(Rational(1, 2), 0, RoundDir::down),
                  std::invalid_argument);
}

TEST_CASE("round_to_denominator matches enumeration oracle") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 2000; ++trial) {
    Rational x = random_rational(rng, 500, 500);
    long max_den = 1 + static_cast<long>(rng() % 64);
    Rational down = round_to_denominator(x, max_den, RoundDir::down);
    Rational up = round_to_denominator(x, max_den, RoundDir::up);
    CHECK(down == enumerate_round(x, max_den, RoundDir::down));
    CHECK(up == enumerate_round(x, max_den, RoundDir::up));
    // sandwich + denominator bound, by construction
    CHECK(down <= x);
    CHECK(up >= x);
    CHECK(down.den() <= max_den);
    CHECK(up.den() <= max_den);
  }
}

TEST_CASE("rounding is idempotent on representable values") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    long max_den = 1 + static_cast<long>(rng() % 64);
    Rational x = random_rational(rng, 200, max_den);
    CHECK(round_to_denominator(x, max_den, RoundDir::down) == x);
    CHECK(round_to_denominator(x, max_den, RoundDir::up) == x);
  }
}

TEST_CASE("uniqueness window: short intervals hold at most one representable") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    long max_den = 2 + static_cast<long>(rng() % 63);
    Rational lo = random_rational(rng, 300, 300);
    Rational width = Rational(1, max_den) * Rational(1, max_den) * Rational(1, 2);
    Rational hi = lo + width;
    CHECK(enumerate_in_window(lo, hi, max_den).size() <= 1);
  }
}

TEST_CASE("rational_from_binary_search: pinned examples") {
  // degenerate interval: value already representable
  CHECK(rational_from_binary_search(Rational(1, 2), Rational(1, 2), 2,
                                    SearchFlag::last_move_raised_lo) ==
        Rational(1, 2));
  CHECK(rational_from_binary_search(Rational(1, 2), Rational(1, 2), 2,
                                    SearchFlag::last_move_lowered_hi) ==
        Rational(1, 2));

  // midpoint of [0.333, 0.334] is 0.3335; round up over q <= 16.
  Rational lo(333, 1000), hi(334, 1000);
  Rational mid = (lo + hi) / Rational(2);
  Rational expect = enumerate_round(mid, 16, RoundDir::up);
  CHECK(expect == Rational(5, 14));  // frozen after running the oracle
  CHECK(rational_from_binary_search(lo, hi, 16, SearchFlag::last_move_raised_lo) ==
        Rational(5, 14));

  CHECK(rational_from_binary_search(Rational(4999, 10000), Rational(5001, 10000),
                                    8, SearchFlag::last_move_lowered_hi) ==
        Rational(1, 2));

  CHECK_THROWS_AS(rational_from_binary_search(Rational(1), Rational(0), 4,
                                              SearchFlag::last_move_raised_lo),
                  std::invalid_argument);
}

TEST_CASE("string round trip keeps exact value") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Rational x = random_rational(rng, 100000, 100000);
    if (rng() & 1) x = -x;
    CHECK(Rational::from_string(x.str()) == x);
  }
}
