#include <doctest.h>

#include <cmath>
#include <random>

#include "badtheta/catalog.hpp"
#include "badtheta/errors.hpp"
#include "badtheta/verify.hpp"

using namespace badtheta;

namespace {

const ThetaForm& sample() {
  static const ThetaForm theta = catalog_entry("sqrt2-sqrt3").form();
  return theta;
}

Rational cube(const Rational& x) { return x * x * x; }

}  // namespace

TEST_CASE("weighted_cube") {
  CHECK(weighted_cube(1, Rational(1, 2), Rational(1, 3)) == Rational(1, 8));
  CHECK(weighted_cube(8, Rational(1, 10), Rational(1, 2)) == Rational(1));
  CHECK(weighted_cube(8, Rational(1, 2), Rational(1, 10)) == Rational(8));
}

TEST_CASE("scores at Q = 1") {
  const ThetaForm& theta = sample();
  Point eta{Rational(1, 5), Rational(3, 7)};
  ScoreReport r = bad_theta_score(theta, eta, 1);
  Rational d1 = dist_to_nearest_int(theta.theta1() - eta.x1);
  Rational d2 = dist_to_nearest_int(theta.theta2() - eta.x2);
  CHECK(r.measure == cube(std::max(d1, d2)));
  CHECK(r.root == 3);
  CHECK(r.argmin_q == 1);

  ScoreReport hit = bad_theta_score(theta, {theta.theta1(), theta.theta2()}, 1);
  CHECK(hit.measure == 0);

  ScoreReport ab = bad_alpha_beta_score(theta, 1);
  CHECK(ab.measure == cube(std::max(dist_to_nearest_int(theta.theta1()), dist_to_nearest_int(theta.theta2()))));
}

TEST_CASE("scores are non-increasing in Q and thread independent") {
  const ThetaForm& theta = sample();
  Point eta{Rational(17, 1000), Rational(33, 1000)};
  Rational prev = bad_theta_score(theta, eta, 1).measure;
  for (std::uint64_t Q : {10u, 100u, 1000u, 20000u}) {
    ScoreReport r = bad_theta_score(theta, eta, Q, 3);
    CHECK(r.measure <= prev);
    CHECK(r.measure == bad_theta_score(theta, eta, Q, 1).measure);
    prev = r.measure;
    REQUIRE_FALSE(r.trace.empty());
    CHECK(r.trace.back().measure == r.measure);
    CHECK(r.trace.back().q == r.argmin_q);
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
      CHECK(r.trace[k].q > r.trace[k - 1].q);
      CHECK(r.trace[k].measure < r.trace[k - 1].measure);
    }
  }
  Rational ab_prev = bad_alpha_beta_score(theta, 10).measure;
  CHECK(bad_alpha_beta_score(theta, 5000, 4).measure <= ab_prev);
}

TEST_CASE("cubing agrees with high precision evaluation") {
  const ThetaForm& theta = sample();
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    Point eta{Rational(static_cast<long>(rng() % 9999) + 1, 10000), Rational(static_cast<long>(rng() % 9999) + 1, 10000)};
    std::uint64_t q = rng() % 5000 + 1;
    Rational d1 = dist_to_nearest_int(theta.theta1() * Rational(Integer(static_cast<unsigned long>(q))) - eta.x1);
    Rational d2 = dist_to_nearest_int(theta.theta2() * Rational(Integer(static_cast<unsigned long>(q))) - eta.x2);
    mpf_class qf(static_cast<double>(q), 512);
    mpf_class a = mpf_class(d1, 512);
    mpf_class b = mpf_class(d2, 512);
    // x = q^{1/3} by Newton
    mpf_class x(std::cbrt(static_cast<double>(q)), 512);
    for (int k = 0; k < 60; ++k) x = x - (x * x * x - qf) / (3 * x * x);
    mpf_class lhs = x * x * a;
    mpf_class rhs = x * b;
    mpf_class direct = lhs > rhs ? lhs : rhs;
    mpf_class cubed(weighted_cube(q, d1, d2), 512);
    mpf_class direct_cubed = direct * direct * direct;
    mpf_class rel = abs(direct_cubed - cubed) / cubed;
    CHECK(rel < mpf_class(1e-100, 512));
  }
}

TEST_CASE("linear_form_score") {
  const ThetaForm& theta = sample();
  BestApproxVector v;
  v.index = 1;
  v.m = {1, 1};
  v.height_sq = 1;
  BestApproxSequence one{theta, {v}, 1};
  ScoreReport r = linear_form_score(theta, {Rational(1, 4), Rational(1, 4)}, one);
  CHECK(r.measure == Rational(1, 2));
  REQUIRE(r.argmin_vector);
  CHECK(*r.argmin_vector == IntegerPair{1, 1});

  BestApproxSequence seq = enumerate_best_approx(theta, 10000);
  const auto& w = seq.vectors.at(5);
  // a point on the resonance line m1 x1 + m2 x2 = 0
  Point on_line{Rational(w.m.m2, 1000), Rational(-w.m.m1, 1000)};
  on_line.x1.canonicalize();
  on_line.x2.canonicalize();
  ScoreReport z = linear_form_score(theta, on_line, seq);
  CHECK(z.measure == 0);
  REQUIRE(z.argmin_vector);
  CHECK(*z.argmin_vector == w.m);
}

TEST_CASE("brute_best_approx oracle") {
  const ThetaForm& theta = sample();
  CHECK(brute_best_approx(theta, 0).vectors.empty());
  BestApproxSequence one = brute_best_approx(theta, 1);
  REQUIRE(one.vectors.size() == 1);
  CHECK(one.vectors[0].m == IntegerPair{1, 1});
  CHECK(one.vectors[0].zeta == form_value(theta, {1, 1}).zeta);
  CHECK(one.vectors[0].zeta < form_value(theta, {1, 0}).zeta);
  CHECK(one.vectors[0].zeta < form_value(theta, {0, 1}).zeta);
  CHECK(one.vectors[0].zeta < form_value(theta, {-1, 1}).zeta);

  BestApproxSequence small = brute_best_approx(theta, 900);
  BestApproxSequence big = brute_best_approx(theta, 3600);
  REQUIRE(small.vectors.size() <= big.vectors.size());
  for (std::size_t k = 0; k < small.vectors.size(); ++k) CHECK(small.vectors[k] == big.vectors[k]);

  ThetaForm rational(Rational(2, 5), Rational(1, 3));
  CHECK_THROWS_AS(brute_best_approx(rational, 100), DegenerateForm);
}

TEST_CASE("full grid marking on a hand example") {
  SieveConfig cfg{4, 1};
  Rectangle origin{Rational(0), Rational(0), 0};
  auto hit = full_grid_dangerous(origin, {1, 0}, cfg);
  REQUIRE(hit.size() == 16);
  CHECK(hit.front() == 0);
  CHECK(hit.back() == 15);
}
