#pragma once

// 128-bit fixed-point fractions in [0, 1). Arithmetic wraps modulo 1, which is
// exactly the torus the linear forms live on. Used only as a fast filter in
// front of exact checks; never as the final word.

#include <cstdint>
#include <stdexcept>

#include "badtheta/numerics.hpp"

namespace badtheta::detail {

using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr long double kTwoPow128 = 340282366920938463463374607431768211456.0L;

struct MulResult {
  std::int64_t whole;  // floor(q * x) in the fixed model
  u128 frac;           // fractional part, scaled by 2^128
};

class FixedFrac {
 public:
  FixedFrac() = default;
  explicit constexpr FixedFrac(u128 bits) : bits_(bits) {}

  /// floor(x * 2^128) / 2^128 for x in [0, 1).
  static FixedFrac from_rational(const Rational& x) {
    Rational frac = x - Rational(floor(x));
    Integer scaled = floor(frac * Rational(Integer(1) << 128));
    Integer hi = scaled >> 64;
    Integer lo = scaled - (hi << 64);
    return FixedFrac((static_cast<u128>(to_u64(hi)) << 64) | to_u64(lo));
  }

  u128 bits() const noexcept { return bits_; }

  /// q * x split into whole and fractional parts. |q| < 2^63.
  MulResult mul(std::int64_t q) const noexcept {
    if (q >= 0) return mul_unsigned(static_cast<std::uint64_t>(q));
    MulResult pos = mul_unsigned(0 - static_cast<std::uint64_t>(q));
    if (pos.frac == 0) return {-pos.whole, 0};
    return {-pos.whole - 1, static_cast<u128>(0) - pos.frac};
  }

  /// Signed representative of a wrapped fraction, in [-1/2, 1/2).
  static i128 centered(u128 frac) noexcept { return static_cast<i128>(frac); }

  /// Distance to the nearest integer of a wrapped fraction, scaled by 2^128.
  static u128 distance(u128 frac) noexcept {
    i128 c = centered(frac);
    return c < 0 ? static_cast<u128>(-(c + 1)) + 1 : static_cast<u128>(c);
  }

  static long double to_long_double(u128 v) noexcept {
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    const auto lo = static_cast<std::uint64_t>(v);
    return (static_cast<long double>(hi) * 18446744073709551616.0L + static_cast<long double>(lo)) / kTwoPow128;
  }

  static long double to_long_double_signed(u128 v) noexcept {
    i128 c = centered(v);
    if (c >= 0) return to_long_double(static_cast<u128>(c));
    return -to_long_double(static_cast<u128>(-(c + 1)) + 1);
  }

 private:
  static std::uint64_t to_u64(const Integer& v) {
    std::uint64_t out = 0;
    std::size_t count = 0;
    mpz_export(&out, &count, -1, sizeof(out), 0, 0, v.get_mpz_t());
    if (count > 1) throw std::logic_error("FixedFrac: limb overflow");
    return out;
  }

  MulResult mul_unsigned(std::uint64_t q) const noexcept {
    const auto hi = static_cast<std::uint64_t>(bits_ >> 64);
    const auto lo = static_cast<std::uint64_t>(bits_);
    const u128 a = static_cast<u128>(q) * lo;  // contributes at 2^0
    const u128 b = static_cast<u128>(q) * hi;  // contributes at 2^64
    const auto a_lo = static_cast<std::uint64_t>(a);
    const auto a_hi = static_cast<std::uint64_t>(a >> 64);
    const auto b_lo = static_cast<std::uint64_t>(b);
    const auto b_hi = static_cast<std::uint64_t>(b >> 64);
    const u128 mid = static_cast<u128>(b_lo) + a_hi;
    const auto mid_lo = static_cast<std::uint64_t>(mid);
    const auto carry = static_cast<std::uint64_t>(mid >> 64);
    return {static_cast<std::int64_t>(b_hi + carry), (static_cast<u128>(mid_lo) << 64) | a_lo};
  }

  u128 bits_ = 0;
};

}  // namespace badtheta::detail
