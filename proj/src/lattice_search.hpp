#pragma once

// Enumeration of integer pairs m with small weighted height and small ‖θ·m‖.
//
// For a fixed m2 the admissible m1 are the points of the planar lattice
// {(m1, m1 θ1 - p)} shifted by (0, frac(m2 θ2)) that fall in the box
// |m1| <= T, |y| < Z. One Gauss-reduced basis per (T, Z) serves every m2, so
// each row costs a handful of floating operations. Candidates pass a 128-bit
// fixed-point filter and then an exact rational test; the floating stages
// only ever over-approximate.

#include <cstdint>
#include <functional>
#include <vector>

#include "badtheta/numerics.hpp"
#include "fixed_frac.hpp"

namespace badtheta::detail {

struct Candidate {
  IntegerPair m;  // canonical sign
  std::uint64_t height_sq = 0;
  Rational zeta;
  Integer m0;
};

struct BoxQuery {
  std::uint64_t height_above = 0;  // exclusive
  std::uint64_t height_max = 0;    // inclusive
  Rational zeta_max;
  bool closed = false;  // ζ <= zeta_max instead of ζ < zeta_max
};

class FormLattice {
 public:
  explicit FormLattice(const ThetaForm& theta);

  /// Every canonical m in the box, sorted by (height, m2, m1).
  std::vector<Candidate> search(const BoxQuery& query, unsigned threads = 1) const;

  /// Visits box members in row order until `visit` returns false.
  void search_each(const BoxQuery& query, const std::function<bool(Candidate&&)>& visit) const;

  /// Exact ζ and m0 for a nonzero pair.
  Candidate exact(IntegerPair m) const;

 private:
  struct Plan;
  Plan make_plan(const BoxQuery& query) const;
  void scan_rows(const Plan& plan, std::int64_t m2_begin, std::int64_t m2_end,
                 const std::function<bool(Candidate&&)>& visit) const;

  ThetaForm theta_;
  FixedFrac t1_;
  FixedFrac t2_;
  Integer den_;  // common denominator of θ1, θ2
  Integer a1_;   // θ1 * den_
  Integer a2_;   // θ2 * den_
};

}  // namespace badtheta::detail
