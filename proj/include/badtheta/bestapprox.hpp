#pragma once

// Best approximation vectors of the linear form θ1 m1 + θ2 m2 with respect to
// the weighted height M = sqrt(max(|m1|, m2²)).
//
// A nonzero m is a best approximation vector when no other integer pair m'
// (m' != ±m) has both weighted_height_sq(m') <= weighted_height_sq(m) and
// ‖θ·m'‖ <= ‖θ·m‖. Sorted by height these form a staircase: M² strictly
// increases and ζ strictly decreases along the sequence.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "badtheta/numerics.hpp"

namespace badtheta {

/// Type1: |m1| > m2² (height carried by m1). Type2: m2² >= |m1|; ties go here.
enum class Kind { Type1, Type2 };

Kind classify(IntegerPair m) noexcept;
const char* to_string(Kind kind) noexcept;
Kind parse_kind(std::string_view text);

/// Representative of ±m with m2 > 0, or m2 = 0 and m1 > 0.
IntegerPair canonical(IntegerPair m) noexcept;

struct BestApproxVector {
  std::size_t index = 0;  // 1-based position ν in the full sequence
  Integer m0;
  IntegerPair m;
  std::uint64_t height_sq = 0;
  Rational zeta;
  Kind kind = Kind::Type2;

  friend bool operator==(const BestApproxVector& a, const BestApproxVector& b) {
    return a.index == b.index && a.m0 == b.m0 && a.m == b.m && a.height_sq == b.height_sq &&
           a.zeta == b.zeta && a.kind == b.kind;
  }
};

struct BestApproxSequence {
  ThetaForm theta;
  std::vector<BestApproxVector> vectors;
  std::uint64_t height_sq_max = 0;  // complete up to and including this M²
};

/// Throws DegenerateForm if ζ(m) = 0.
bool is_best_approximation(const ThetaForm& theta, IntegerPair m);

/// All best approximation vectors with M² <= height_sq_max, increasing M².
/// Throws DegenerateForm on a zero or tie of the form inside the range and
/// PrecisionExhausted if θ's truncation cannot support the range.
BestApproxSequence enumerate_best_approx(const ThetaForm& theta, std::uint64_t height_sq_max,
                                         unsigned threads = 1);

struct Violation {
  std::string scope;  // "global", "type1" or "type2"
  std::size_t first = 0;
  std::size_t second = 0;
  std::string detail;
};

/// Consecutive pairs failing ζ_ν² · (M²_{ν+1})³ <= 1.
std::vector<Violation> audit_minkowski(const BestApproxSequence& seq);

/// Pairs failing M²_{ν+step} >= 4 M²_ν, globally and inside each kind.
std::vector<Violation> audit_growth(const BestApproxSequence& seq, std::size_t step = 28);

/// Vectors of `kind` with R^{2n} < M² <= R^{2(n+1)}. Throws IncompleteSequence
/// when the sequence bound is below R^{2(n+1)}.
std::vector<BestApproxVector> type_window(const BestApproxSequence& seq, Kind kind, std::uint64_t R,
                                          unsigned n);

/// R^{2n} as an exact integer.
Integer height_sq_power(std::uint64_t R, unsigned n);

// Line-delimited export: a header line followed by one JSON object per vector
// with fields index, m0, m1, m2, height_sq, zeta, kind in that order.
void write_sequence(std::ostream& out, const BestApproxSequence& seq);
BestApproxSequence read_sequence(std::istream& in);

/// FNV-1a over the canonical export; stable across platforms and runs.
std::string sequence_fingerprint(const BestApproxSequence& seq);

}  // namespace badtheta
