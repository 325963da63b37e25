#include "badtheta/bestapprox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "badtheta/errors.hpp"
#include "lattice_search.hpp"

namespace badtheta {

Kind classify(IntegerPair m) noexcept {
  const std::uint64_t a1 = m.m1 < 0 ? 0 - static_cast<std::uint64_t>(m.m1) : static_cast<std::uint64_t>(m.m1);
  const std::uint64_t a2 = m.m2 < 0 ? 0 - static_cast<std::uint64_t>(m.m2) : static_cast<std::uint64_t>(m.m2);
  return a1 > a2 * a2 ? Kind::Type1 : Kind::Type2;
}

const char* to_string(Kind kind) noexcept { return kind == Kind::Type1 ? "type1" : "type2"; }

Kind parse_kind(std::string_view text) {
  if (text == "type1") return Kind::Type1;
  if (text == "type2") return Kind::Type2;
  throw ConfigError("unknown vector kind '" + std::string(text) + "'");
}

IntegerPair canonical(IntegerPair m) noexcept {
  if (m.m2 < 0 || (m.m2 == 0 && m.m1 < 0)) return -m;
  return m;
}

bool is_best_approximation(const ThetaForm& theta, IntegerPair m) {
  if (m.is_zero()) throw std::invalid_argument("is_best_approximation: m must be nonzero");
  const IntegerPair self = canonical(m);
  detail::FormLattice lattice(theta);
  detail::Candidate own = lattice.exact(self);
  if (own.zeta == 0) throw DegenerateForm("form vanishes at the queried vector");

  bool dominated = false;
  lattice.search_each({0, own.height_sq, own.zeta, true}, [&](detail::Candidate&& c) {
    if (c.m == self) return true;
    dominated = true;
    return false;
  });
  return !dominated;
}

namespace {

std::uint64_t initial_window(std::uint64_t current, const Rational& zeta) {
  // Minkowski: a point with ζ <= zeta exists below zeta^{-2/3}.
  const long double guess = std::pow(static_cast<long double>(zeta.get_d()), -2.0L / 3.0L);
  std::uint64_t hi = current + 1;
  if (std::isfinite(guess) && guess > static_cast<long double>(hi)) {
    hi = guess >= 1.8e19L ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(std::ceil(guess));
  }
  return hi;
}

}  // namespace

BestApproxSequence enumerate_best_approx(const ThetaForm& theta, std::uint64_t height_sq_max, unsigned threads) {
  BestApproxSequence seq{theta, {}, height_sq_max};
  if (height_sq_max == 0) return seq;
  detail::FormLattice lattice(theta);

  std::uint64_t current_h = 0;
  Rational current_zeta = 1;  // above every possible ‖·‖
  while (current_h < height_sq_max) {
    std::uint64_t hi = current_h == 0 ? 1 : initial_window(current_h, current_zeta);
    std::vector<detail::Candidate> found;
    for (;;) {
      hi = std::min(hi, height_sq_max);
      found = lattice.search({current_h, hi, current_zeta, false}, threads);
      if (!found.empty() || hi == height_sq_max) break;
      hi = hi > height_sq_max / 2 ? height_sq_max : hi * 2;
    }
    if (found.empty()) break;

    // Lowest height wins; at that height the smallest ζ, which must be unique.
    const std::uint64_t h = found.front().height_sq;
    auto best = found.begin();
    std::size_t ties = 0;
    for (auto it = found.begin(); it != found.end() && it->height_sq == h; ++it) {
      if (it->zeta < best->zeta) {
        best = it;
        ties = 0;
      } else if (it != best && it->zeta == best->zeta) {
        ++ties;
      }
    }
    if (best->zeta == 0) {
      throw DegenerateForm("linear form vanishes at m = (" + std::to_string(best->m.m1) + ", " +
                           std::to_string(best->m.m2) + "), height " + std::to_string(h) +
                           "; theta needs more digits");
    }
    if (ties > 0) {
      throw DegenerateForm("distinct vectors share the record value zeta = " + to_string(best->zeta) +
                           " at height " + std::to_string(h));
    }

    BestApproxVector v;
    v.index = seq.vectors.size() + 1;
    v.m0 = best->m0;
    v.m = best->m;
    v.height_sq = h;
    v.zeta = best->zeta;
    v.kind = classify(best->m);
    seq.vectors.push_back(std::move(v));
    current_h = h;
    current_zeta = best->zeta;
  }

  if (!seq.vectors.empty()) validate_precision(theta, height_sq_max, seq.vectors.back().zeta);
  return seq;
}

std::vector<Violation> audit_minkowski(const BestApproxSequence& seq) {
  std::vector<Violation> out;
  for (std::size_t k = 0; k + 1 < seq.vectors.size(); ++k) {
    const auto& cur = seq.vectors[k];
    const auto& next = seq.vectors[k + 1];
    Integer h(std::to_string(next.height_sq), 10);
    Rational lhs = cur.zeta * cur.zeta * Rational(h * h * h);
    if (lhs > 1) {
      out.push_back({"global", cur.index, next.index,
                     "zeta^2 * (M^2)^3 = " + to_decimal(lhs, 8) + " > 1"});
    }
  }
  return out;
}

std::vector<Violation> audit_growth(const BestApproxSequence& seq, std::size_t step) {
  std::vector<Violation> out;
  if (step == 0) return out;
  auto check = [&](const std::vector<const BestApproxVector*>& list, const char* scope) {
    for (std::size_t k = 0; k + step < list.size(); ++k) {
      const auto* lo = list[k];
      const auto* hi = list[k + step];
      const auto needed = static_cast<unsigned __int128>(lo->height_sq) * 4;
      if (static_cast<unsigned __int128>(hi->height_sq) < needed) {
        out.push_back({scope, lo->index, hi->index,
                       "M^2 " + std::to_string(hi->height_sq) + " < 4 * " + std::to_string(lo->height_sq)});
      }
    }
  };
  std::vector<const BestApproxVector*> all;
  std::vector<const BestApproxVector*> t1;
  std::vector<const BestApproxVector*> t2;
  for (const auto& v : seq.vectors) {
    all.push_back(&v);
    (v.kind == Kind::Type1 ? t1 : t2).push_back(&v);
  }
  check(all, "global");
  check(t1, "type1");
  check(t2, "type2");
  return out;
}

Integer height_sq_power(std::uint64_t R, unsigned n) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), R, 2UL * n);
  return r;
}

std::vector<BestApproxVector> type_window(const BestApproxSequence& seq, Kind kind, std::uint64_t R, unsigned n) {
  if (R < 2) throw std::invalid_argument("type_window: R must be >= 2");
  const Integer lo = height_sq_power(R, n);
  const Integer hi = height_sq_power(R, n + 1);
  if (Integer(std::to_string(seq.height_sq_max), 10) < hi) {
    throw IncompleteSequence("sequence complete to " + std::to_string(seq.height_sq_max) +
                             " but window needs " + hi.get_str());
  }
  std::vector<BestApproxVector> out;
  for (const auto& v : seq.vectors) {
    if (v.kind != kind) continue;
    Integer h(std::to_string(v.height_sq), 10);
    if (h > lo && h <= hi) out.push_back(v);
  }
  return out;
}

}  // namespace badtheta
