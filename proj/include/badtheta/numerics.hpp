#pragma once

// Exact rational services shared by every module. Nothing here rounds.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace badtheta {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "p/q", "p", or a plain decimal such as "-0.125" into an exact value.
/// Throws ConfigError on anything else (including a zero denominator).
Rational parse_rational(std::string_view text);

/// Canonical "p/q" with q > 0 and gcd(p, q) = 1. Integers print as "p/1".
std::string to_string(const Rational& x);

std::string to_string(const Integer& x);

/// Number of decimal digits after the point in a decimal literal, 0 for "p/q".
unsigned decimal_places(std::string_view text);

/// Approximate decimal rendering with `digits` significant digits, for reports.
std::string to_decimal(const Rational& x, int digits = 12);

Integer floor(const Rational& x);
Integer ceil(const Rational& x);

/// Smallest integer s with s*s >= n.
Integer isqrt_ceil(const Integer& n);

/// ‖x‖: distance from x to the nearest integer, in [0, 1/2].
Rational dist_to_nearest_int(const Rational& x);

struct IntegerPair {
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;

  bool is_zero() const noexcept { return m1 == 0 && m2 == 0; }
  IntegerPair operator-() const noexcept { return {-m1, -m2}; }
  friend auto operator<=>(const IntegerPair&, const IntegerPair&) = default;
};

/// M² = max(|m1|, m2²). Requires |m2| < 2^31 so the square fits.
std::uint64_t weighted_height_sq(IntegerPair m);

/// The target pair Θ with the bound on how far each rational sits from the
/// irrational it stands for.
class ThetaForm {
 public:
  /// Throws ConfigError unless 0 < θ_i < 1 and 0 <= declared_error < 1/2.
  ThetaForm(Rational theta1, Rational theta2, Rational declared_error = 0);

  const Rational& theta1() const noexcept { return theta1_; }
  const Rational& theta2() const noexcept { return theta2_; }
  const Rational& declared_error() const noexcept { return declared_error_; }

  friend bool operator==(const ThetaForm& a, const ThetaForm& b) {
    return a.theta1_ == b.theta1_ && a.theta2_ == b.theta2_ &&
           a.declared_error_ == b.declared_error_;
  }

 private:
  Rational theta1_;
  Rational theta2_;
  Rational declared_error_;
};

struct FormValue {
  Rational zeta;  // ‖θ1 m1 + θ2 m2‖
  Integer m0;     // |m0 + θ1 m1 + θ2 m2| = zeta
};

/// Exact value of the linear form. Half-integer ties pick the smaller |m0|,
/// then the smaller m0. Throws std::invalid_argument for m = 0.
FormValue form_value(const ThetaForm& theta, IntegerPair m);

/// Throws PrecisionExhausted unless
///   zeta_min > 10 * (H * err + ceil(sqrt(H)) * err),  H = height_sq_max.
void validate_precision(const ThetaForm& theta, std::uint64_t height_sq_max,
                        const Rational& zeta_min);

}  // namespace badtheta
