#include "lattice_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace badtheta::detail {

namespace {

constexpr i128 kMaxBasisQ = static_cast<i128>(1) << 62;
constexpr long double kBoxSlack = 1.0L + 1e-9L;

struct BasisVec {
  i128 q = 0;
  i128 p = 0;
  long double x = 0;
  long double y = 0;

  long double norm2() const { return x * x + y * y; }
};


std::uint64_t isqrt_floor(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

struct FormLattice::Plan {
  BoxQuery query;
  long double T = 1;
  long double Z = 1;
  BasisVec u;
  BasisVec v;
  int sign = 1;                // q_u p_v - q_v p_u
  long double b_radius = 0;    // bound on |b - b*|
  u128 zeta_fixed_max = 0;     // fixed-point acceptance threshold, tolerance included
};

FormLattice::FormLattice(const ThetaForm& theta)
    : theta_(theta),
      t1_(FixedFrac::from_rational(theta.theta1())),
      t2_(FixedFrac::from_rational(theta.theta2())) {
  mpz_lcm(den_.get_mpz_t(), theta.theta1().get_den_mpz_t(), theta.theta2().get_den_mpz_t());
  a1_ = theta.theta1().get_num() * (den_ / theta.theta1().get_den());
  a2_ = theta.theta2().get_num() * (den_ / theta.theta2().get_den());
}

Candidate FormLattice::exact(IntegerPair m) const {
  if (m.is_zero()) throw std::invalid_argument("FormLattice::exact: zero pair");
  Integer x = a1_ * static_cast<long>(m.m1) + a2_ * static_cast<long>(m.m2);
  Integer q;
  Integer r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), x.get_mpz_t(), den_.get_mpz_t());
  Candidate c;
  c.m = m;
  c.height_sq = weighted_height_sq(m);
  Integer twice = r * 2;
  if (twice < den_) {
    c.zeta = Rational(r, den_);
    c.m0 = -q;
  } else if (twice > den_) {
    c.zeta = Rational(den_ - r, den_);
    c.m0 = -(q + 1);
  } else {
    FormValue fv = form_value(theta_, m);
    c.zeta = fv.zeta;
    c.m0 = fv.m0;
    return c;
  }
  c.zeta.canonicalize();
  return c;
}

FormLattice::Plan FormLattice::make_plan(const BoxQuery& query) const {
  Plan plan;
  plan.query = query;
  plan.T = static_cast<long double>(query.height_max);

  // Box height in y, loosened so that floating error can only add candidates.
  long double zeta = query.zeta_max >= Rational(1, 2) ? 1.0L : static_cast<long double>(query.zeta_max.get_d());
  plan.Z = zeta * kBoxSlack + std::ldexp(1.0L, -90);

  // Fixed filter: |error| <= (|m1| + |m2| + 2) ulp for each evaluation.
  const u128 half = static_cast<u128>(1) << 127;
  const u128 tol = (static_cast<u128>(query.height_max) + isqrt_floor(query.height_max) + 8) * 4;
  if (query.zeta_max >= Rational(1, 2)) {
    plan.zeta_fixed_max = half;
  } else {
    Integer scaled = floor(query.zeta_max * Rational(Integer(1) << 128)) + 1;
    Integer hi = scaled >> 64;
    Integer lo = scaled - (hi << 64);
    u128 bits = (static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui());
    plan.zeta_fixed_max = bits >= half - tol ? half : bits + tol;
  }

  auto make = [&](i128 q, i128 p) {
    if (q >= kMaxBasisQ || q <= -kMaxBasisQ) throw std::overflow_error("FormLattice: basis vector too long");
    MulResult r = t1_.mul(static_cast<std::int64_t>(q));
    i128 whole = r.whole;
    if (FixedFrac::centered(r.frac) < 0) whole += 1;
    long double delta = static_cast<long double>(whole - p) + FixedFrac::to_long_double_signed(r.frac);
    BasisVec b;
    b.q = q;
    b.p = p;
    b.x = static_cast<long double>(q) / plan.T;
    b.y = delta / plan.Z;
    return b;
  };

  // Lagrange-Gauss reduction of {(1, θ1), (0, 1)} in the scaled metric. The
  // coordinates are re-derived from (q, p) at every step.
  BasisVec b1 = make(1, 0);
  BasisVec b2 = make(0, -1);
  if (b1.norm2() > b2.norm2()) std::swap(b1, b2);
  for (int iter = 0; iter < 512; ++iter) {
    long double mu = (b1.x * b2.x + b1.y * b2.y) / b1.norm2();
    if (!std::isfinite(mu) || std::fabs(mu) > 1e18L) break;
    auto r = static_cast<i128>(std::llround(mu));
    if (r != 0) {
      i128 nq = b2.q - r * b1.q;
      i128 np = b2.p - r * b1.p;
      if (nq >= kMaxBasisQ || nq <= -kMaxBasisQ) break;
      b2 = make(nq, np);
    }
    if (b2.norm2() >= b1.norm2()) break;
    std::swap(b1, b2);
  }
  plan.u = b1;
  plan.v = b2;
  i128 det = plan.u.q * plan.v.p - plan.v.q * plan.u.p;
  if (det != 1 && det != -1) throw std::logic_error("FormLattice: basis lost unimodularity");
  plan.sign = det > 0 ? 1 : -1;

  // |v*| = |det of scaled basis| / |u| = 1 / (T Z |u|).
  long double u_len = std::sqrt(plan.u.norm2());
  long double v_star = 1.0L / (plan.T * plan.Z * u_len);
  plan.b_radius = std::sqrt(2.0L) * kBoxSlack / v_star;
  return plan;
}

void FormLattice::scan_rows(const Plan& plan, std::int64_t m2_begin, std::int64_t m2_end,
                            const std::function<bool(Candidate&&)>& visit) const {
  const BoxQuery& query = plan.query;
  const BasisVec& u = plan.u;
  const BasisVec& v = plan.v;
  const long double W = kBoxSlack;
  const auto T = static_cast<i128>(query.height_max);
  std::vector<std::int64_t> row_hits;

  for (std::int64_t m2 = m2_begin; m2 < m2_end; ++m2) {
    const u128 gamma = t2_.mul(m2).frac;
    const FixedFrac g(gamma);
    // Shift coordinates: a* = -s q_v γ, b* = s q_u γ.
    MulResult a_star = g.mul(static_cast<std::int64_t>(-plan.sign * v.q));
    MulResult b_star = g.mul(static_cast<std::int64_t>(plan.sign * u.q));
    const long double fa = FixedFrac::to_long_double(a_star.frac);
    const long double fb = FixedFrac::to_long_double(b_star.frac);

    row_hits.clear();
    const auto db_lo = static_cast<std::int64_t>(std::ceil(fb - plan.b_radius)) - 1;
    const auto db_hi = static_cast<std::int64_t>(std::floor(fb + plan.b_radius)) + 1;
    for (std::int64_t db = db_lo; db <= db_hi; ++db) {
      const long double sb = static_cast<long double>(db) - fb;
      long double lo = -INFINITY;
      long double hi = INFINITY;
      bool empty = false;
      auto constrain = [&](long double coef, long double offset) {
        if (std::fabs(coef) < 1e-30L) {
          if (std::fabs(offset) > W) empty = true;
          return;
        }
        long double e1 = (-W - offset) / coef;
        long double e2 = (W - offset) / coef;
        lo = std::max(lo, std::min(e1, e2));
        hi = std::min(hi, std::max(e1, e2));
      };
      constrain(u.x, sb * v.x);
      constrain(u.y, sb * v.y);
      if (empty || lo > hi) continue;
      const auto da_lo = static_cast<std::int64_t>(std::ceil(lo + fa)) - 1;
      const auto da_hi = static_cast<std::int64_t>(std::floor(hi + fa)) + 1;
      for (std::int64_t da = da_lo; da <= da_hi; ++da) {
        const i128 a = static_cast<i128>(a_star.whole) + da;
        const i128 b = static_cast<i128>(b_star.whole) + db;
        const i128 m1 = a * u.q + b * v.q;
        if (m1 > T || m1 < -T) continue;
        if (m2 == 0 && m1 <= 0) continue;
        row_hits.push_back(static_cast<std::int64_t>(m1));
      }
    }
    if (row_hits.empty()) continue;
    std::sort(row_hits.begin(), row_hits.end());
    row_hits.erase(std::unique(row_hits.begin(), row_hits.end()), row_hits.end());

    const std::uint64_t m2_sq = static_cast<std::uint64_t>(m2) * static_cast<std::uint64_t>(m2);
    for (std::int64_t m1 : row_hits) {
      const std::uint64_t abs_m1 = static_cast<std::uint64_t>(m1 < 0 ? -m1 : m1);
      const std::uint64_t h = std::max(abs_m1, m2_sq);
      if (h <= query.height_above || h > query.height_max) continue;
      const u128 f = t1_.mul(m1).frac + gamma;
      if (FixedFrac::distance(f) > plan.zeta_fixed_max) continue;
      Candidate c = exact({m1, m2});
      const bool inside = query.closed ? c.zeta <= query.zeta_max : c.zeta < query.zeta_max;
      if (!inside) continue;
      if (!visit(std::move(c))) return;
    }
  }
}

void FormLattice::search_each(const BoxQuery& query, const std::function<bool(Candidate&&)>& visit) const {
  if (query.height_max == 0 || query.height_max <= query.height_above) return;
  Plan plan = make_plan(query);
  const auto m2_max = static_cast<std::int64_t>(isqrt_floor(query.height_max));
  scan_rows(plan, 0, m2_max + 1, visit);
}

std::vector<Candidate> FormLattice::search(const BoxQuery& query, unsigned threads) const {
  std::vector<Candidate> out;
  if (query.height_max == 0 || query.height_max <= query.height_above) return out;
  Plan plan = make_plan(query);
  const auto rows = static_cast<std::int64_t>(isqrt_floor(query.height_max)) + 1;

  const std::int64_t workers = std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(1, rows / 256));
  std::vector<std::vector<Candidate>> parts(static_cast<std::size_t>(workers));
  auto run = [&](std::int64_t w) {
    const std::int64_t begin = rows * w / workers;
    const std::int64_t end = rows * (w + 1) / workers;
    auto& sink = parts[static_cast<std::size_t>(w)];
    scan_rows(plan, begin, end, [&sink](Candidate&& c) {
      sink.push_back(std::move(c));
      return true;
    });
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  for (auto& part : parts) {
    for (auto& c : part) out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.height_sq != b.height_sq) return a.height_sq < b.height_sq;
    if (a.m.m2 != b.m.m2) return a.m.m2 < b.m.m2;
    return a.m.m1 < b.m.m1;
  });
  return out;
}

}  // namespace badtheta::detail
