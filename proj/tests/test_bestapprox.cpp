#include <doctest.h>

#include <sstream>

#include "badtheta/bestapprox.hpp"
#include "badtheta/catalog.hpp"
#include "badtheta/errors.hpp"
#include "badtheta/verify.hpp"

using namespace badtheta;

namespace {

BestApproxVector synthetic(std::size_t index, std::uint64_t height_sq, Rational zeta, Kind kind = Kind::Type1) {
  BestApproxVector v;
  v.index = index;
  v.height_sq = height_sq;
  v.zeta = std::move(zeta);
  v.kind = kind;
  return v;
}

const ThetaForm& sample() {
  static const ThetaForm theta = catalog_entry("sqrt2-sqrt3").form();
  return theta;
}

}  // namespace

TEST_CASE("classify and canonical") {
  CHECK(classify({5, 2}) == Kind::Type1);
  CHECK(classify({3, 2}) == Kind::Type2);
  CHECK(classify({4, 2}) == Kind::Type2);  // tie
  CHECK(classify({0, 1}) == Kind::Type2);
  CHECK(canonical({3, -2}) == IntegerPair{-3, 2});
  CHECK(canonical({-4, 0}) == IntegerPair{4, 0});
  CHECK(canonical({1, 1}) == IntegerPair{1, 1});
  for (IntegerPair m : {IntegerPair{3, -2}, IntegerPair{-4, 0}, IntegerPair{-7, -5}}) {
    CHECK(canonical(canonical(m)) == canonical(m));
    CHECK(weighted_height_sq(canonical(m)) == weighted_height_sq(m));
    CHECK(form_value(sample(), canonical(m)).zeta == form_value(sample(), m).zeta);
  }
  CHECK(parse_kind(to_string(Kind::Type1)) == Kind::Type1);
  CHECK(parse_kind(to_string(Kind::Type2)) == Kind::Type2);
}

TEST_CASE("is_best_approximation on a rational form") {
  ThetaForm theta(Rational(2, 5), Rational(1, 3));
  CHECK_FALSE(is_best_approximation(theta, {1, 1}));
  CHECK(is_best_approximation(theta, {1, -1}));
  CHECK(is_best_approximation(theta, {-1, 1}));
  CHECK_THROWS_AS(is_best_approximation(theta, {5, 3}), DegenerateForm);
}

TEST_CASE("enumerate_best_approx small bounds") {
  ThetaForm rational(Rational(2, 5), Rational(1, 3));
  CHECK(enumerate_best_approx(rational, 0).vectors.empty());
  CHECK_THROWS_AS(enumerate_best_approx(rational, 100), DegenerateForm);

  BestApproxSequence one = enumerate_best_approx(sample(), 1);
  REQUIRE(one.vectors.size() == 1);
  CHECK(one.vectors[0].m == IntegerPair{1, 1});
  CHECK(one.vectors[0].height_sq == 1);
  CHECK(one.vectors[0].zeta.get_d() == doctest::Approx(0.14626).epsilon(1e-4));
  CHECK(one.vectors[0].index == 1);
}

TEST_CASE("enumeration matches the brute-force oracle") {
  for (const auto& entry : catalog()) {
    CAPTURE(entry.name);
    ThetaForm theta = entry.form();
    for (std::uint64_t bound : {1u, 2u, 50u, 900u}) {
      BestApproxSequence fast = enumerate_best_approx(theta, bound, 2);
      BestApproxSequence slow = brute_best_approx(theta, bound);
      CHECK(fast.vectors == slow.vectors);
    }
  }
}

TEST_CASE("record property and best approximation membership") {
  BestApproxSequence seq = enumerate_best_approx(sample(), 1000000, 4);
  REQUIRE(seq.vectors.size() > 10);
  for (std::size_t k = 0; k < seq.vectors.size(); ++k) {
    const auto& v = seq.vectors[k];
    CHECK(v.index == k + 1);
    CHECK(canonical(v.m) == v.m);
    CHECK(v.kind == classify(v.m));
    CHECK(v.height_sq == weighted_height_sq(v.m));
    CHECK(v.zeta == form_value(sample(), v.m).zeta);
    if (k > 0) {
      CHECK(v.height_sq > seq.vectors[k - 1].height_sq);
      CHECK(v.zeta < seq.vectors[k - 1].zeta);
    }
  }
  for (std::size_t k = 0; k < 12; ++k) CHECK(is_best_approximation(sample(), seq.vectors[k].m));
}

TEST_CASE("enumeration is prefix stable and thread independent") {
  BestApproxSequence a = enumerate_best_approx(sample(), 200000, 1);
  BestApproxSequence b = enumerate_best_approx(sample(), 5000000, 8);
  REQUIRE(a.vectors.size() <= b.vectors.size());
  for (std::size_t k = 0; k < a.vectors.size(); ++k) CHECK(a.vectors[k] == b.vectors[k]);
  CHECK(b.vectors[a.vectors.size()].height_sq > 200000);
}

TEST_CASE("audit_minkowski on synthetic sequences") {
  ThetaForm theta = sample();
  BestApproxSequence ok{theta, {synthetic(1, 1, Rational(1, 10)), synthetic(2, 4, Rational(1, 20))}, 4};
  CHECK(audit_minkowski(ok).empty());
  BestApproxSequence bad{theta, {synthetic(1, 1, Rational(1, 5)), synthetic(2, 4, Rational(1, 20))}, 4};
  auto v = audit_minkowski(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].first == 1);
  CHECK(v[0].second == 2);
}

TEST_CASE("audit_growth on synthetic sequences") {
  ThetaForm theta = sample();
  BestApproxSequence short_seq{theta, {}, 0};
  for (std::size_t k = 1; k <= 28; ++k) short_seq.vectors.push_back(synthetic(k, k, Rational(1, 2)));
  CHECK(audit_growth(short_seq).empty());

  BestApproxSequence consecutive{theta, {}, 0};
  for (std::size_t k = 1; k <= 29; ++k) consecutive.vectors.push_back(synthetic(k, k, Rational(1, 2)));
  CHECK(audit_growth(consecutive).empty());  // 29 >= 4 * 1

  BestApproxSequence slow{theta, {}, 0};
  for (std::size_t k = 1; k <= 29; ++k) slow.vectors.push_back(synthetic(k, 99 + k, Rational(1, 2)));
  auto v = audit_growth(slow);
  REQUIRE(v.size() == 2);  // global and type1 (all synthetic vectors are Type1)
  CHECK(v[0].scope == "global");
  CHECK(v[0].first == 1);
  CHECK(v[0].second == 29);
  CHECK(v[1].scope == "type1");
}

TEST_CASE("audits pass on catalog sequences") {
  for (const auto& entry : catalog()) {
    CAPTURE(entry.name);
    BestApproxSequence seq = enumerate_best_approx(entry.form(), 10000);
    CHECK(audit_minkowski(seq).empty());
    CHECK(audit_growth(seq, 28).empty());
  }
}

TEST_CASE("type windows") {
  BestApproxSequence seq = enumerate_best_approx(sample(), 256);
  BestApproxSequence oracle = brute_best_approx(sample(), 256);
  for (Kind kind : {Kind::Type1, Kind::Type2}) {
    auto w0 = type_window(seq, kind, 4, 0);
    for (const auto& v : w0) {
      CHECK(v.height_sq > 1);
      CHECK(v.height_sq <= 16);
      CHECK(v.kind == kind);
    }
    std::vector<BestApproxVector> expected;
    for (const auto& v : oracle.vectors) {
      if (v.kind == kind && v.height_sq > 16 && v.height_sq <= 256) expected.push_back(v);
    }
    CHECK(type_window(seq, kind, 4, 1) == expected);
  }
  CHECK_THROWS_AS(type_window(seq, Kind::Type1, 4, 2), IncompleteSequence);
  BestApproxSequence empty{sample(), {}, 256};
  CHECK(type_window(empty, Kind::Type2, 4, 1).empty());
  CHECK(height_sq_power(16, 4) == Integer("4294967296", 10));
}

TEST_CASE("sequence files round-trip") {
  BestApproxSequence seq = enumerate_best_approx(sample(), 10000);
  std::stringstream buf;
  write_sequence(buf, seq);
  BestApproxSequence back = read_sequence(buf);
  CHECK(back.theta == seq.theta);
  CHECK(back.height_sq_max == seq.height_sq_max);
  CHECK(back.vectors == seq.vectors);
  CHECK(sequence_fingerprint(back) == sequence_fingerprint(seq));

  std::stringstream empty_file;
  write_sequence(empty_file, enumerate_best_approx(sample(), 0));
  CHECK(read_sequence(empty_file).vectors.empty());

  std::stringstream truncated(buf.str().substr(0, buf.str().size() / 2));
  CHECK_THROWS_AS(read_sequence(truncated), ConfigError);
}
