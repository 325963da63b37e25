#include "badtheta/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "badtheta/errors.hpp"
#include "badtheta/journal.hpp"
#include "badtheta/verify.hpp"

namespace badtheta {

namespace {

Integer power(std::uint64_t base, unsigned long exp) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

Integer big(std::uint64_t v) { return Integer(static_cast<unsigned long>(v)); }
Integer big(std::int64_t v) { return Integer(static_cast<long>(v)); }

unsigned ceil_log2(std::uint64_t R) {
  unsigned k = 0;
  while ((std::uint64_t{1} << k) < R) ++k;
  return k;
}

}  // namespace

const char* to_string(SurvivorPolicy policy) noexcept {
  return policy == SurvivorPolicy::Lexicographic ? "lexicographic" : "seeded-random";
}

SurvivorPolicy parse_policy(std::string_view text) {
  if (text == "lexicographic" || text == "lex") return SurvivorPolicy::Lexicographic;
  if (text == "seeded-random" || text == "random") return SurvivorPolicy::SeededRandom;
  throw ConfigError("unknown survivor policy '" + std::string(text) + "'");
}

Rational SieveConfig::delta() const { return Rational(Integer(1), power(R, 3)); }

Rational SieveConfig::epsilon() const { return Rational(Integer(1), power(R, 4)); }

bool SieveConfig::guarantees_survivors() const {
  return Integer(1000) * power(R, 2) * ceil_log2(R) < power(R, 3);
}

void SieveConfig::validate() const {
  if (R < 2) throw ConfigError("R must be at least 2");
  if (R > 1625) throw ConfigError("R too large: R^3 children must fit in 32-bit indices");
}

Rational Rectangle::width1(const SieveConfig& cfg) const {
  return cfg.delta() / Rational(power(cfg.R, 2UL * level));
}

Rational Rectangle::width2(const SieveConfig& cfg) const { return cfg.delta() / Rational(power(cfg.R, level)); }

Point Rectangle::center(const SieveConfig& cfg) const {
  return {b1 + width1(cfg) / 2, b2 + width2(cfg) / 2};
}

bool Rectangle::contains(const Point& p, const SieveConfig& cfg) const {
  return p.x1 >= b1 && p.x1 <= b1 + width1(cfg) && p.x2 >= b2 && p.x2 <= b2 + width2(cfg);
}

bool Rectangle::contains(const Rectangle& inner, const SieveConfig& cfg) const {
  return inner.b1 >= b1 && inner.b1 + inner.width1(cfg) <= b1 + width1(cfg) && inner.b2 >= b2 &&
         inner.b2 + inner.width2(cfg) <= b2 + width2(cfg);
}

Rectangle Rectangle::child(ChildIndex idx, const SieveConfig& cfg) const {
  if (idx.i >= cfg.R * cfg.R || idx.j >= cfg.R) throw std::out_of_range("Rectangle::child: index out of range");
  Rectangle c;
  c.level = level + 1;
  c.b1 = b1 + width1(cfg) / Rational(big(cfg.R * cfg.R)) * big(idx.i);
  c.b2 = b2 + width2(cfg) / Rational(big(cfg.R)) * big(idx.j);
  return c;
}

std::vector<Rectangle> subdivide(const Rectangle& rect, const SieveConfig& cfg) {
  std::vector<Rectangle> out;
  out.reserve(cfg.child_count());
  for (std::uint64_t i = 0; i < cfg.R * cfg.R; ++i) {
    for (std::uint64_t j = 0; j < cfg.R; ++j) out.push_back(rect.child({i, j}, cfg));
  }
  return out;
}

bool range_meets_strip(const Rational& lo, const Rational& hi, const Rational& eps) {
  // Integers c with c - ε < hi and c + ε > lo.
  const Integer c_min = floor(lo - eps) + 1;
  return Rational(c_min) - eps < hi;
}

std::pair<Rational, Rational> form_range(IntegerPair m, const Rational& x1, const Rational& x2, const Rational& w1,
                                         const Rational& w2) {
  const Integer a = big(m.m1);
  const Integer b = big(m.m2);
  Rational base = a * x1 + b * x2;
  Rational s1 = a * w1;
  Rational s2 = b * w2;
  Rational lo = base;
  Rational hi = base;
  (s1 < 0 ? lo : hi) += s1;
  (s2 < 0 ? lo : hi) += s2;
  return {lo, hi};
}

Rectangle select_base(const ThetaForm&, const SieveConfig& cfg, const BestApproxSequence& seq) {
  if (seq.height_sq_max < 1) throw IncompleteSequence("base selection needs the sequence complete to M^2 = 1");
  std::vector<IntegerPair> constraints;
  for (const auto& v : seq.vectors) {
    if (v.height_sq <= 1) constraints.push_back(v.m);
  }
  const Rational delta = cfg.delta();
  const Rational eps = cfg.epsilon();
  const std::uint64_t steps = 4 * cfg.R;
  for (std::uint64_t i = 1; i < steps; ++i) {
    const Rational b1(big(i), big(steps));
    if (b1 + delta >= 1) break;
    for (std::uint64_t j = 1; j < steps; ++j) {
      const Rational b2(big(j), big(steps));
      if (b2 + delta >= 1) break;
      const bool clear = std::none_of(constraints.begin(), constraints.end(), [&](const IntegerPair& m) {
        auto [lo, hi] = form_range(m, b1, b2, delta, delta);
        return range_meets_strip(lo, hi, eps);
      });
      if (clear) return Rectangle{b1, b2, 0};
    }
  }
  throw NoBaseFound("no base rectangle on the 1/(4R) grid avoids the unit-height strips");
}

namespace {

// Runs of children hit by one strip along one line of the child grid.
struct Segment {
  Integer c;
  std::uint64_t line;
  std::uint64_t first;
  std::uint64_t last;
};

// by_row: lines are rows (fixed j), the free index is i. Otherwise lines are
// columns (fixed i) and the free index is j.
std::vector<Segment> strip_segments(const Rectangle& rect, IntegerPair m, const SieveConfig& cfg, bool by_row) {
  const std::uint64_t R = cfg.R;
  const Rational eps = cfg.epsilon();
  const Rational w1 = rect.width1(cfg) / Rational(big(R * R));
  const Rational w2 = rect.width2(cfg) / Rational(big(R));
  const Integer a = big(m.m1);
  const Integer b = big(m.m2);
  const Rational s1 = a * w1;
  const Rational s2 = b * w2;
  Rational lo0 = 0;
  Rational hi0 = 0;
  (s1 < 0 ? lo0 : hi0) += s1;
  (s2 < 0 ? lo0 : hi0) += s2;

  const std::uint64_t lines = by_row ? R : R * R;
  const std::uint64_t count = by_row ? R * R : R;
  const Rational& s = by_row ? s1 : s2;
  if (s == 0) throw std::invalid_argument("strip_segments: form is constant along the free index");

  // Integers whose strips meet the parent at all.
  auto [p_lo, p_hi] = form_range(m, rect.b1, rect.b2, rect.width1(cfg), rect.width2(cfg));
  const Integer c_first = floor(p_lo - eps) + 1;
  const Integer c_last = ceil(p_hi + eps) - 1;

  std::vector<Segment> out;
  const Rational last_k(big(count - 1));
  for (Integer c = c_first; c <= c_last; ++c) {
    const Rational up = Rational(c) + eps;
    const Rational down = Rational(c) - eps;
    for (std::uint64_t line = 0; line < lines; ++line) {
      const Rational base = by_row ? Rational(a * rect.b1 + b * (rect.b2 + w2 * big(line)))
                                   : Rational(a * (rect.b1 + w1 * big(line)) + b * rect.b2);
      // Child k is hit iff base + k s + lo0 < c + ε and base + k s + hi0 > c - ε.
      Rational e_up = (up - base - lo0) / s;
      Rational e_down = (down - base - hi0) / s;
      const Rational& open_lo = s > 0 ? e_down : e_up;
      const Rational& open_hi = s > 0 ? e_up : e_down;
      Integer k_lo = floor(open_lo) + 1;
      Integer k_hi = ceil(open_hi) - 1;
      if (k_lo < 0) k_lo = 0;
      if (k_hi > Integer(big(count - 1))) k_hi = big(count - 1);
      if (k_lo > k_hi) continue;
      out.push_back({c, line, k_lo.get_ui(), k_hi.get_ui()});
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint32_t> dangerous_children(const Rectangle& rect, IntegerPair m, const SieveConfig& cfg) {
  if (m.is_zero()) throw std::invalid_argument("dangerous_children: zero vector");
  const bool by_row = m.m1 != 0;
  const std::uint64_t R = cfg.R;
  std::vector<std::uint32_t> out;
  for (const auto& seg : strip_segments(rect, m, cfg, by_row)) {
    for (std::uint64_t k = seg.first; k <= seg.last; ++k) {
      const std::uint64_t i = by_row ? k : seg.line;
      const std::uint64_t j = by_row ? seg.line : k;
      out.push_back(static_cast<std::uint32_t>(i * R + j));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

unsigned strips_per_line(const Rectangle& rect, IntegerPair m, Kind kind, const SieveConfig& cfg) {
  const bool by_row = kind == Kind::Type1;
  if ((by_row && m.m1 == 0) || (!by_row && m.m2 == 0)) return 0;
  std::vector<std::pair<std::uint64_t, Integer>> hits;
  for (auto& seg : strip_segments(rect, m, cfg, by_row)) hits.emplace_back(seg.line, seg.c);
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  unsigned best = 0;
  for (std::size_t k = 0; k < hits.size();) {
    std::size_t e = k;
    while (e < hits.size() && hits[e].first == hits[k].first) ++e;
    best = std::max(best, static_cast<unsigned>(e - k));
    k = e;
  }
  return best;
}

bool gap_condition(IntegerPair m, Kind kind, unsigned level, const SieveConfig& cfg) {
  const Rational delta = cfg.delta();
  const Rational eps = cfg.epsilon();
  const Rational abs1(abs(big(m.m1)));
  const Rational abs2(abs(big(m.m2)));
  const Rational Rn(power(cfg.R, level));
  const Rational R2n(power(cfg.R, 2UL * level));
  const Rational Rn1(power(cfg.R, level + 1UL));
  const Rational R2n1(power(cfg.R, 2UL * (level + 1UL)));
  if (kind == Kind::Type1) {
    if (abs1 == 0) return false;
    const Rational k1 = abs2 / abs1;
    const Rational gap = 2 * eps / abs1 + 2 * delta / R2n1 + 2 * k1 * delta / Rn1;
    return Rational(1) / abs1 - gap > delta / R2n;
  }
  if (abs2 == 0) return false;
  const Rational k2 = abs1 / abs2;
  const Rational gap = 2 * eps / abs2 + 2 * delta / Rn1 + 2 * k2 * delta / R2n1;
  return Rational(1) / abs2 - gap > delta / Rn;
}

DangerBounds danger_bounds(std::uint64_t R) {
  const double r2 = static_cast<double>(R) * static_cast<double>(R);
  const double lg = std::log2(static_cast<double>(R));
  return {5 * r2, 6 * r2, 600 * r2 * lg, 400 * r2 * lg, 1000 * r2 * lg};
}

LevelRecord evaluate_level(const SieveState& state, const BestApproxSequence& seq, const SieveConfig& cfg,
                           unsigned threads) {
  const unsigned n = state.rect.level;
  std::vector<BestApproxVector> window = type_window(seq, Kind::Type1, cfg.R, n);
  for (auto& v : type_window(seq, Kind::Type2, cfg.R, n)) window.push_back(std::move(v));
  std::sort(window.begin(), window.end(),
            [](const BestApproxVector& a, const BestApproxVector& b) { return a.index < b.index; });

  std::vector<std::vector<std::uint32_t>> killed(window.size());
  std::vector<VectorStats> stats(window.size());
  auto work = [&](std::size_t k) {
    const auto& v = window[k];
    killed[k] = dangerous_children(state.rect, v.m, cfg);
    stats[k] = {v.index, v.kind, v.m, killed[k].size(), gap_condition(v.m, v.kind, n, cfg),
                strips_per_line(state.rect, v.m, v.kind, cfg)};
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, window.size()));
  if (workers == 1) {
    for (std::size_t k = 0; k < window.size(); ++k) work(k);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < window.size(); k += workers) work(k);
      });
    }
  }

  LevelRecord record;
  record.level = n;
  record.rect = state.rect;
  std::vector<bool> dead(cfg.child_count(), false);
  for (std::size_t k = 0; k < window.size(); ++k) {
    for (auto idx : killed[k]) dead[idx] = true;
    (stats[k].kind == Kind::Type1 ? record.stats.type1_total : record.stats.type2_total) += stats[k].kills;
  }
  record.stats.vectors = std::move(stats);
  record.stats.killed = static_cast<std::uint64_t>(std::count(dead.begin(), dead.end(), true));
  record.stats.survivors = cfg.child_count() - record.stats.killed;

  if (record.stats.survivors > 0) {
    std::uint64_t pick = 0;
    if (cfg.policy == SurvivorPolicy::SeededRandom) {
      std::mt19937_64 rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(n) + 1)));
      pick = rng() % record.stats.survivors;
    }
    for (std::uint64_t idx = 0; idx < dead.size(); ++idx) {
      if (dead[idx]) continue;
      if (pick-- == 0) {
        record.chosen = ChildIndex{idx / cfg.R, idx % cfg.R};
        break;
      }
    }
  }
  return record;
}

SieveState sieve_step(const SieveState& state, const BestApproxSequence& seq, const SieveConfig& cfg,
                      LevelRecord* record, unsigned threads) {
  LevelRecord rec = evaluate_level(state, seq, cfg, threads);
  if (record != nullptr) *record = rec;
  if (!rec.chosen) {
    throw NoSurvivor("all " + std::to_string(cfg.child_count()) + " children killed at level " +
                         std::to_string(rec.level),
                     rec.level);
  }
  return SieveState{state.rect.child(*rec.chosen, cfg)};
}

RunResult run_sieve(const ThetaForm& theta, const SieveConfig& cfg, const BestApproxSequence& seq,
                    const RunOptions& options) {
  cfg.validate();
  const Integer needed = height_sq_power(cfg.R, cfg.depth);
  if (Integer(std::to_string(seq.height_sq_max), 10) < needed) {
    throw IncompleteSequence("sieve to depth " + std::to_string(cfg.depth) + " needs the sequence complete to " +
                             needed.get_str());
  }
  if (!(seq.theta == theta)) throw ConfigError("sequence was enumerated for a different theta");

  RunJournal journal{cfg, theta, sequence_fingerprint(seq), seq.height_sq_max, seq.vectors.size(), {}, {}, {}};
  SieveState state;

  if (options.resume != nullptr) {
    const RunJournal& old = *options.resume;
    if (!(old.config == cfg) || !(old.theta == theta) || old.sequence_fingerprint != journal.sequence_fingerprint) {
      throw ConfigError("journal header does not match this configuration");
    }
    journal.base = old.base;
    state.rect = old.base;
    for (const auto& rec : old.levels) {
      if (!rec.chosen || rec.level >= cfg.depth) break;
      if (!(rec.rect == state.rect)) throw ConfigError("journal level " + std::to_string(rec.level) + " is inconsistent");
      journal.levels.push_back(rec);
      state.rect = state.rect.child(*rec.chosen, cfg);
    }
  } else {
    journal.base = select_base(theta, cfg, seq);
    state.rect = journal.base;
    if (options.on_progress) options.on_progress(journal, nullptr);
  }

  while (state.rect.level < cfg.depth) {
    LevelRecord rec = evaluate_level(state, seq, cfg, options.threads);
    journal.levels.push_back(rec);
    if (options.on_progress) options.on_progress(journal, &journal.levels.back());
    if (!rec.chosen) {
      throw NoSurvivor("all " + std::to_string(cfg.child_count()) + " children killed at level " +
                           std::to_string(rec.level),
                       rec.level);
    }
    state.rect = state.rect.child(*rec.chosen, cfg);
  }

  Certificate cert{theta, cfg, state.rect.center(cfg), cfg.epsilon(), cfg.depth, needed, {}, {}, 0, {}, 0,
                   journal.sequence_fingerprint};
  journal.eta = cert.eta;

  BestApproxSequence covered{theta, {}, seq.height_sq_max};
  for (const auto& v : seq.vectors) {
    if (Integer(std::to_string(v.height_sq), 10) <= needed) covered.vectors.push_back(v);
  }
  if (!covered.vectors.empty()) {
    ScoreReport lf = linear_form_score(theta, cert.eta, covered);
    cert.verified_form_min = lf.measure;
    cert.form_argmin = lf.argmin_vector;
    if (!(cert.verified_form_min > cert.epsilon)) {
      throw std::logic_error("certificate margin " + to_string(cert.verified_form_min) + " does not exceed epsilon");
    }
  } else {
    cert.verified_form_min = Rational(1, 2);
  }
  if (options.verify_Q > 0) {
    ScoreReport bt = bad_theta_score(theta, cert.eta, options.verify_Q, options.threads);
    cert.bad_theta_Q = options.verify_Q;
    cert.bad_theta_cube = bt.measure;
    cert.bad_theta_argmin = bt.argmin_q;
  }
  if (options.on_progress) options.on_progress(journal, nullptr);
  return {std::move(cert), std::move(journal)};
}

}  // namespace badtheta
