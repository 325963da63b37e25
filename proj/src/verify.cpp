#include "badtheta/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "badtheta/errors.hpp"

namespace badtheta {

double ScoreReport::approx() const {
  double v = measure.get_d();
  if (root == 1 || v <= 0) return v;
  return std::pow(v, 1.0 / static_cast<double>(root));
}

Rational weighted_cube(std::uint64_t q, const Rational& d1, const Rational& d2) {
  Integer qq(std::to_string(q), 10);
  Rational a = Rational(qq * qq) * d1 * d1 * d1;
  Rational b = Rational(qq) * d2 * d2 * d2;
  return a < b ? b : a;
}

namespace {

// ‖q θ - η‖ = min(r, den - r) / den with r = (q a E - e A) mod den.
struct Channel {
  Integer den;
  Integer den_cubed;
  Integer step;
  Integer start;

  Channel(const Rational& theta, const Rational& eta) {
    den = theta.get_den() * eta.get_den();
    den_cubed = den * den * den;
    Integer s = theta.get_num() * eta.get_den();
    mpz_fdiv_r(step.get_mpz_t(), s.get_mpz_t(), den.get_mpz_t());
    Integer e = -(eta.get_num() * theta.get_den());
    mpz_fdiv_r(start.get_mpz_t(), e.get_mpz_t(), den.get_mpz_t());
  }

  Integer residue_at(std::uint64_t q) const {
    Integer r = start + step * Integer(std::to_string(q), 10);
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), den.get_mpz_t());
    return r;
  }
};

struct Record {
  std::uint64_t q;
  Integer num;
  Integer den;
};

// Records (strictly decreasing measure) over q in [q_begin, q_end).
std::vector<Record> scan_chunk(const Channel& c1, const Channel& c2, std::uint64_t q_begin, std::uint64_t q_end) {
  std::vector<Record> records;
  Integer r1 = c1.residue_at(q_begin);
  Integer r2 = c2.residue_at(q_begin);
  Integer d1, d2, t1n, t2n, lhs, rhs, best_num, best_den;
  bool have_best = false;
  for (std::uint64_t q = q_begin; q < q_end; ++q) {
    d1 = c1.den - r1;
    if (r1 < d1) d1 = r1;
    d2 = c2.den - r2;
    if (r2 < d2) d2 = r2;
    const unsigned long qs = static_cast<unsigned long>(q);
    t1n = d1 * d1 * d1;
    t1n *= qs;
    t1n *= qs;
    t2n = d2 * d2 * d2;
    t2n *= qs;
    lhs = t1n * c2.den_cubed;
    rhs = t2n * c1.den_cubed;
    const bool first_wins = lhs >= rhs;
    const Integer& vn = first_wins ? t1n : t2n;
    const Integer& vd = first_wins ? c1.den_cubed : c2.den_cubed;
    if (!have_best || vn * best_den < best_num * vd) {
      best_num = vn;
      best_den = vd;
      have_best = true;
      records.push_back({q, vn, vd});
    }
    r1 += c1.step;
    if (r1 >= c1.den) r1 -= c1.den;
    r2 += c2.step;
    if (r2 >= c2.den) r2 -= c2.den;
  }
  return records;
}

ScoreReport weighted_scan(const char* name, const ThetaForm& theta, const Point& eta, std::uint64_t Q,
                          unsigned threads) {
  if (Q < 1) throw std::invalid_argument("score horizon Q must be >= 1");
  const Channel c1(theta.theta1(), eta.x1);
  const Channel c2(theta.theta2(), eta.x2);

  const std::uint64_t workers = std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(1, Q / 4096));
  std::vector<std::vector<Record>> parts(workers);
  auto run = [&](std::uint64_t w) {
    const std::uint64_t begin = 1 + Q * w / workers;
    const std::uint64_t end = 1 + Q * (w + 1) / workers;
    parts[w] = scan_chunk(c1, c2, begin, end);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  // A global record is a record of its own chunk that beats everything before.
  ScoreReport report;
  report.name = name;
  report.bound = Q;
  report.root = 3;
  const Record* best = nullptr;
  for (const auto& part : parts) {
    for (const auto& rec : part) {
      if (best == nullptr || rec.num * best->den < best->num * rec.den) {
        best = &rec;
        Rational m(rec.num, rec.den);
        m.canonicalize();
        report.trace.push_back({rec.q, m});
      }
    }
  }
  report.measure = report.trace.back().measure;
  report.argmin_q = report.trace.back().q;
  return report;
}

}  // namespace

ScoreReport bad_theta_score(const ThetaForm& theta, const Point& eta, std::uint64_t Q, unsigned threads) {
  return weighted_scan("bad_theta", theta, eta, Q, threads);
}

ScoreReport bad_alpha_beta_score(const ThetaForm& theta, std::uint64_t Q, unsigned threads) {
  return weighted_scan("bad_alpha_beta", theta, Point{Rational(0), Rational(0)}, Q, threads);
}

ScoreReport linear_form_score(const ThetaForm&, const Point& eta, const BestApproxSequence& seq) {
  if (seq.vectors.empty()) throw std::invalid_argument("linear_form_score: empty sequence");
  ScoreReport report;
  report.name = "linear_form";
  report.bound = seq.height_sq_max;
  report.root = 1;
  bool first = true;
  for (const auto& v : seq.vectors) {
    Rational value = eta.x1 * Integer(static_cast<long>(v.m.m1)) + eta.x2 * Integer(static_cast<long>(v.m.m2));
    Rational d = dist_to_nearest_int(value);
    if (first || d < report.measure) {
      report.measure = d;
      report.argmin_vector = v.m;
      first = false;
    }
  }
  return report;
}

BestApproxSequence brute_best_approx(const ThetaForm& theta, std::uint64_t height_sq_max) {
  BestApproxSequence seq{theta, {}, height_sq_max};
  if (height_sq_max == 0) return seq;
  const auto bound = static_cast<std::int64_t>(height_sq_max);
  auto m2_max = static_cast<std::int64_t>(std::sqrt(static_cast<double>(height_sq_max)));
  while (m2_max * m2_max > bound) --m2_max;
  while ((m2_max + 1) * (m2_max + 1) <= bound) ++m2_max;

  // Group every canonical pair by height, keeping the smallest ζ per height
  // and how many pairs attain it.
  struct Slot {
    Rational zeta;
    IntegerPair m;
    Integer m0;
    std::size_t count = 0;
  };
  std::map<std::uint64_t, Slot> by_height;
  for (std::int64_t m2 = 0; m2 <= m2_max; ++m2) {
    for (std::int64_t m1 = -bound; m1 <= bound; ++m1) {
      if (m2 == 0 && m1 <= 0) continue;
      const IntegerPair m{m1, m2};
      FormValue fv = form_value(theta, m);
      if (fv.zeta == 0) {
        throw DegenerateForm("linear form vanishes at m = (" + std::to_string(m1) + ", " + std::to_string(m2) + ")");
      }
      auto& slot = by_height[weighted_height_sq(m)];
      if (slot.count == 0 || fv.zeta < slot.zeta) {
        slot = {fv.zeta, m, fv.m0, 1};
      } else if (fv.zeta == slot.zeta) {
        ++slot.count;
      }
    }
  }

  // m is best iff its ζ is below every ζ at lower height and strictly below
  // every other ζ at its own height.
  std::optional<Rational> running;
  for (const auto& [h, slot] : by_height) {
    if (!running || slot.zeta < *running) {
      if (slot.count > 1) {
        throw DegenerateForm("distinct vectors share the record value zeta = " + to_string(slot.zeta) +
                             " at height " + std::to_string(h));
      }
      BestApproxVector v;
      v.index = seq.vectors.size() + 1;
      v.m0 = slot.m0;
      v.m = slot.m;
      v.height_sq = h;
      v.zeta = slot.zeta;
      v.kind = std::abs(slot.m.m1) > slot.m.m2 * slot.m.m2 ? Kind::Type1 : Kind::Type2;
      seq.vectors.push_back(std::move(v));
      running = slot.zeta;
    }
  }
  return seq;
}

std::vector<std::uint32_t> full_grid_dangerous(const Rectangle& rect, IntegerPair m, const SieveConfig& cfg) {
  const std::uint64_t R = cfg.R;
  const Rational eps = cfg.epsilon();
  const Rational w1 = rect.width1(cfg) / Rational(Integer(static_cast<unsigned long>(R * R)));
  const Rational w2 = rect.width2(cfg) / Rational(Integer(static_cast<unsigned long>(R)));
  const Integer m1(static_cast<long>(m.m1));
  const Integer m2(static_cast<long>(m.m2));
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 0; i < R * R; ++i) {
    const Rational x_lo = rect.b1 + w1 * Integer(static_cast<unsigned long>(i));
    const Rational x_hi = x_lo + w1;
    for (std::uint64_t j = 0; j < R; ++j) {
      const Rational y_lo = rect.b2 + w2 * Integer(static_cast<unsigned long>(j));
      const Rational y_hi = y_lo + w2;
      const Rational corners[4] = {m1 * x_lo + m2 * y_lo, m1 * x_hi + m2 * y_lo, m1 * x_lo + m2 * y_hi,
                                   m1 * x_hi + m2 * y_hi};
      const Rational& lo = *std::min_element(std::begin(corners), std::end(corners));
      const Rational& hi = *std::max_element(std::begin(corners), std::end(corners));
      // Smallest integer c with c + ε > lo; the child is hit iff c - ε < hi.
      const Integer c = floor(lo - eps) + 1;
      if (Rational(c) - eps < hi) out.push_back(static_cast<std::uint32_t>(i * R + j));
    }
  }
  return out;
}

}  // namespace badtheta
