#include <doctest.h>

#include <random>

#include "badtheta/errors.hpp"
#include "badtheta/numerics.hpp"

using namespace badtheta;

TEST_CASE("parse_rational accepts fractions, integers and decimals") {
  CHECK(parse_rational("3/10") == Rational(3, 10));
  CHECK(parse_rational("6/20") == Rational(3, 10));
  CHECK(parse_rational("-6/5") == Rational(-6, 5));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-0.125") == Rational(-1, 8));
  CHECK_THROWS_AS(parse_rational(""), ConfigError);
  CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
  CHECK_THROWS_AS(parse_rational("0.1.2"), ConfigError);
}

TEST_CASE("to_string is canonical p/q") {
  CHECK(to_string(Rational(2, 4)) == "1/2");
  CHECK(to_string(Rational(3)) == "3/1");
  CHECK(parse_rational(to_string(Rational(-22, 7))) == Rational(-22, 7));
  CHECK(decimal_places("0.41421") == 5);
  CHECK(decimal_places("3/4") == 0);
}

TEST_CASE("dist_to_nearest_int") {
  CHECK(dist_to_nearest_int(Rational(3, 10)) == Rational(3, 10));
  CHECK(dist_to_nearest_int(Rational(3, 4)) == Rational(1, 4));
  CHECK(dist_to_nearest_int(Rational(-6, 5)) == Rational(1, 5));
  CHECK(dist_to_nearest_int(Rational(1, 2)) == Rational(1, 2));
  CHECK(dist_to_nearest_int(Rational(5)) == 0);
}

TEST_CASE("dist_to_nearest_int properties on random rationals") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 500; ++t) {
    Rational x(static_cast<long>(rng() % 20001) - 10000, static_cast<long>(rng() % 997) + 1);
    x.canonicalize();
    Rational d = dist_to_nearest_int(x);
    CHECK(d >= 0);
    CHECK(d <= Rational(1, 2));
    CHECK(dist_to_nearest_int(x + 3) == d);
    CHECK(dist_to_nearest_int(-x) == d);
  }
}

TEST_CASE("floor, ceil and isqrt_ceil") {
  CHECK(floor(Rational(-1, 2)) == -1);
  CHECK(ceil(Rational(-1, 2)) == 0);
  CHECK(floor(Rational(7, 2)) == 3);
  CHECK(ceil(Rational(7, 2)) == 4);
  CHECK(isqrt_ceil(Integer(0)) == 0);
  CHECK(isqrt_ceil(Integer(16)) == 4);
  CHECK(isqrt_ceil(Integer(17)) == 5);
}

TEST_CASE("weighted_height_sq") {
  CHECK(weighted_height_sq({5, 2}) == 5);
  CHECK(weighted_height_sq({3, -3}) == 9);
  CHECK(weighted_height_sq({0, 1}) == 1);
  CHECK(weighted_height_sq({-7, 0}) == 7);
}

TEST_CASE("ThetaForm validation") {
  CHECK_NOTHROW(ThetaForm(Rational(2, 5), Rational(1, 3)));
  CHECK_THROWS_AS(ThetaForm(Rational(0), Rational(1, 3)), ConfigError);
  CHECK_THROWS_AS(ThetaForm(Rational(2, 5), Rational(1)), ConfigError);
  CHECK_THROWS_AS(ThetaForm(Rational(2, 5), Rational(1, 3), Rational(1, 2)), ConfigError);
  CHECK_THROWS_AS(ThetaForm(Rational(2, 5), Rational(1, 3), Rational(-1, 10)), ConfigError);
}

TEST_CASE("form_value examples") {
  ThetaForm theta(Rational(2, 5), Rational(1, 3));
  FormValue a = form_value(theta, {1, 1});
  CHECK(a.zeta == Rational(4, 15));
  CHECK(a.m0 == -1);
  FormValue b = form_value(theta, {5, 3});
  CHECK(b.zeta == 0);
  CHECK(b.m0 == -3);
  FormValue c = form_value(theta, {0, 2});
  CHECK(c.zeta == Rational(1, 3));
  CHECK(c.m0 == -1);
  CHECK_THROWS(form_value(theta, {0, 0}));
}

TEST_CASE("form_value agrees with the definition on random pairs") {
  ThetaForm theta(Rational(314159, 1000000), Rational(271828, 1000000));
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    IntegerPair m{static_cast<std::int64_t>(rng() % 2001) - 1000, static_cast<std::int64_t>(rng() % 201) - 100};
    if (m.is_zero()) continue;
    FormValue f = form_value(theta, m);
    Rational v = theta.theta1() * m.m1 + theta.theta2() * m.m2;
    CHECK(f.zeta == dist_to_nearest_int(v));
    Rational lhs = f.m0 + v;
    CHECK(abs(lhs) == f.zeta);
  }
}

TEST_CASE("validate_precision guard") {
  ThetaForm exact(Rational(2, 5), Rational(1, 3));
  CHECK_NOTHROW(validate_precision(exact, 1000000, Rational(0)));

  Integer e50;
  mpz_ui_pow_ui(e50.get_mpz_t(), 10, 50);
  ThetaForm fine(Rational(2, 5), Rational(1, 3), Rational(Integer(1), e50));
  CHECK_NOTHROW(validate_precision(fine, 1000000, parse_rational("1/10000000000")));

  ThetaForm coarse(Rational(2, 5), Rational(1, 3), Rational(1, 10000));
  CHECK_THROWS_AS(validate_precision(coarse, 1000000, Rational(1, 1000)), PrecisionExhausted);
  try {
    validate_precision(coarse, 1000000, Rational(1, 1000));
  } catch (const PrecisionExhausted& e) {
    CHECK(e.extra_digits() > 0);
  }
}
