#pragma once

// Brute-force oracles. Nothing here shares a code path with the enumerator or
// the strip walker it is used to check.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "badtheta/bestapprox.hpp"
#include "badtheta/numerics.hpp"
#include "badtheta/sieve.hpp"

namespace badtheta {

struct TracePoint {
  std::uint64_t q = 0;
  Rational measure;
};

/// Minimum of a quantity over a finite range. Weighted quantities with the
/// exponents (2/3, 1/3) are irrational, so `measure` holds score^root exactly.
struct ScoreReport {
  std::string name;
  std::uint64_t bound = 0;
  Rational measure;
  unsigned root = 1;
  std::uint64_t argmin_q = 0;
  std::optional<IntegerPair> argmin_vector;
  std::vector<TracePoint> trace;  // record-breaking q only

  /// measure^(1/root) as a double, for display.
  double approx() const;
  /// The most recent record, or 0 when the trace is empty.
  std::uint64_t last_record_q() const { return trace.empty() ? 0 : trace.back().q; }
};

/// max(q² d1³, q d2³) = (max(q^{2/3} d1, q^{1/3} d2))³.
Rational weighted_cube(std::uint64_t q, const Rational& d1, const Rational& d2);

/// min over 1 <= q <= Q of max(q^{2/3}‖qθ1 - η1‖, q^{1/3}‖qθ2 - η2‖), cubed.
ScoreReport bad_theta_score(const ThetaForm& theta, const Point& eta, std::uint64_t Q, unsigned threads = 1);

/// Homogeneous version (η = 0).
ScoreReport bad_alpha_beta_score(const ThetaForm& theta, std::uint64_t Q, unsigned threads = 1);

/// min over the vectors of seq of ‖η1 m1 + η2 m2‖. Requires seq nonempty.
ScoreReport linear_form_score(const ThetaForm& theta, const Point& eta, const BestApproxSequence& seq);

/// Exhaustive record extraction over every canonical pair with
/// max(|m1|, m2²) <= bound. Throws DegenerateForm on a zero or a tie.
BestApproxSequence brute_best_approx(const ThetaForm& theta, std::uint64_t height_sq_max);

/// Children of `rect` meeting an open ε-strip of m, by testing all R³ of them.
std::vector<std::uint32_t> full_grid_dangerous(const Rectangle& rect, IntegerPair m, const SieveConfig& cfg);

}  // namespace badtheta
