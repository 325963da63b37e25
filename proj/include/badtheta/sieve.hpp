#pragma once

// Nested-rectangle construction of a shift η whose linear forms
// ‖η1 m1 + η2 m2‖ stay above ε = δ/R along the best approximation sequence.
//
// A level-n rectangle is [b1, b1 + δ/R^{2n}] × [b2, b2 + δ/R^n] with
// δ = 1/R³. Each step splits it into R² × R children, kills every child that
// meets an open ε-strip |m1 x1 + m2 x2 - c| < ε of a vector whose height lies
// in the current window R^{2n} < M² <= R^{2(n+1)}, and descends into one of
// the survivors.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "badtheta/bestapprox.hpp"
#include "badtheta/numerics.hpp"

namespace badtheta {

enum class SurvivorPolicy { Lexicographic, SeededRandom };

const char* to_string(SurvivorPolicy policy) noexcept;
SurvivorPolicy parse_policy(std::string_view text);

struct SieveConfig {
  std::uint64_t R = 16;
  unsigned depth = 4;
  SurvivorPolicy policy = SurvivorPolicy::Lexicographic;
  std::uint64_t seed = 0;

  Rational delta() const;    // 1/R³
  Rational epsilon() const;  // δ/R
  std::uint64_t child_count() const { return R * R * R; }

  /// 1000 R² ceil(log2 R) < R³, the regime where survivors are guaranteed.
  /// Runs outside it are advisory only.
  bool guarantees_survivors() const;

  /// Throws ConfigError for R < 2 or R³ beyond 2^32 children.
  void validate() const;

  friend bool operator==(const SieveConfig&, const SieveConfig&) = default;
};

struct Point {
  Rational x1;
  Rational x2;
  friend bool operator==(const Point&, const Point&) = default;
};

struct ChildIndex {
  std::uint64_t i = 0;  // 0 <= i < R², along x1
  std::uint64_t j = 0;  // 0 <= j < R, along x2
  std::uint64_t flat(std::uint64_t R) const { return i * R + j; }
  friend bool operator==(const ChildIndex&, const ChildIndex&) = default;
};

struct Rectangle {
  Rational b1;
  Rational b2;
  unsigned level = 0;

  Rational width1(const SieveConfig& cfg) const;  // δ/R^{2n}
  Rational width2(const SieveConfig& cfg) const;  // δ/R^n
  Point center(const SieveConfig& cfg) const;
  bool contains(const Point& p, const SieveConfig& cfg) const;
  bool contains(const Rectangle& inner, const SieveConfig& cfg) const;
  Rectangle child(ChildIndex idx, const SieveConfig& cfg) const;

  friend bool operator==(const Rectangle&, const Rectangle&) = default;
};

/// Children in flat order i*R + j (lexicographic in (i, j)).
std::vector<Rectangle> subdivide(const Rectangle& rect, const SieveConfig& cfg);

/// True iff the closed range [lo, hi] meets some open strip (c - ε, c + ε).
bool range_meets_strip(const Rational& lo, const Rational& hi, const Rational& eps);

/// Exact range of m1 x1 + m2 x2 over a closed rectangle of the given widths.
std::pair<Rational, Rational> form_range(IntegerPair m, const Rational& x1, const Rational& x2,
                                         const Rational& w1, const Rational& w2);

/// Grid scan over (i/(4R), j/(4R)) for a level-0 rectangle clear of every
/// strip of the vectors with M² <= 1. Throws NoBaseFound.
Rectangle select_base(const ThetaForm& theta, const SieveConfig& cfg, const BestApproxSequence& seq);

/// Flat indices (sorted) of the children of `rect` that meet an open ε-strip
/// of m. Walks the strips line by line; never visits all children.
std::vector<std::uint32_t> dangerous_children(const Rectangle& rect, IntegerPair m, const SieveConfig& cfg);

/// Largest number of distinct strips c contributing dangerous children to a
/// single row (fixed j) for Type1 vectors, or column (fixed i) for Type2.
unsigned strips_per_line(const Rectangle& rect, IntegerPair m, Kind kind, const SieveConfig& cfg);

/// Whether the separation inequality between neighbouring strip segments
/// holds for this vector at level n:
///   Type1: 1/|m1| - Δ1 > δ/R^{2n},  Δ1 = 2ε/|m1| + 2δ/R^{2(n+1)} + 2 k1 δ/R^{n+1},  k1 = |m2|/|m1|
///   Type2: 1/|m2| - Δ2 > δ/R^n,     Δ2 = 2ε/|m2| + 2δ/R^{n+1} + 2 k2 δ/R^{2(n+1)},  k2 = |m1|/|m2|
bool gap_condition(IntegerPair m, Kind kind, unsigned level, const SieveConfig& cfg);

struct VectorStats {
  std::size_t index = 0;
  Kind kind = Kind::Type1;
  IntegerPair m;
  std::uint64_t kills = 0;  // H_ν
  bool gap_held = false;
  unsigned strips_per_line = 0;
  friend bool operator==(const VectorStats&, const VectorStats&) = default;
};

struct DangerStats {
  std::vector<VectorStats> vectors;
  std::uint64_t type1_total = 0;
  std::uint64_t type2_total = 0;
  std::uint64_t killed = 0;  // size of the union
  std::uint64_t survivors = 0;
  friend bool operator==(const DangerStats&, const DangerStats&) = default;
};

/// Reference bounds for one level, for side-by-side reporting.
struct DangerBounds {
  double per_vector_type1;  // 5R²
  double per_vector_type2;  // 6R²
  double type1_total;       // 600 R² log2 R
  double type2_total;       // 400 R² log2 R
  double total;             // 1000 R² log2 R
};
DangerBounds danger_bounds(std::uint64_t R);

struct LevelRecord {
  unsigned level = 0;
  Rectangle rect;
  DangerStats stats;
  std::optional<ChildIndex> chosen;
  friend bool operator==(const LevelRecord&, const LevelRecord&) = default;
};

struct RunJournal {
  SieveConfig config;
  ThetaForm theta;
  std::string sequence_fingerprint;
  std::uint64_t sequence_height_sq_max = 0;
  std::size_t sequence_count = 0;
  Rectangle base;
  std::vector<LevelRecord> levels;
  std::optional<Point> eta;  // set once the last level completes
};

struct Certificate {
  ThetaForm theta;
  SieveConfig config;
  Point eta;
  Rational epsilon;
  unsigned level = 0;
  Integer height_sq_bound;  // R^{2N}
  Rational verified_form_min;
  std::optional<IntegerPair> form_argmin;
  std::uint64_t bad_theta_Q = 0;  // 0 when not computed
  Rational bad_theta_cube;         // score³ at bad_theta_Q
  std::uint64_t bad_theta_argmin = 0;
  std::string sequence_fingerprint;
};

struct SieveState {
  Rectangle rect;
};

/// One level of the construction without committing to a survivor when none
/// exists. `chosen` is empty exactly when survivors == 0.
LevelRecord evaluate_level(const SieveState& state, const BestApproxSequence& seq, const SieveConfig& cfg,
                           unsigned threads = 1);

/// evaluate_level followed by descent. Throws NoSurvivor.
SieveState sieve_step(const SieveState& state, const BestApproxSequence& seq, const SieveConfig& cfg,
                      LevelRecord* record = nullptr, unsigned threads = 1);

struct RunOptions {
  unsigned threads = 1;
  std::uint64_t verify_Q = 0;  // bad_theta_score horizon stored in the certificate; 0 skips it
  const RunJournal* resume = nullptr;
  /// Called after the base is chosen (record == nullptr) and after every level.
  std::function<void(const RunJournal&, const LevelRecord*)> on_progress;
};

struct RunResult {
  Certificate certificate;
  RunJournal journal;
};

/// Full descent to cfg.depth. The sequence must be complete to R^{2N}.
/// Throws NoSurvivor (after reporting the failing level), IncompleteSequence.
RunResult run_sieve(const ThetaForm& theta, const SieveConfig& cfg, const BestApproxSequence& seq,
                    const RunOptions& options = {});

}  // namespace badtheta
