#include "badtheta/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "badtheta/errors.hpp"

namespace badtheta {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Integer parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw ConfigError("not an integer literal: '" + std::string(s) + "'");
  Integer v(std::string(s), 10);
  return negative ? Integer(-v) : v;
}

Integer pow10(unsigned k) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ConfigError("empty rational literal");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer p = parse_integer(text.substr(0, slash));
    Integer q = parse_integer(text.substr(slash + 1));
    if (q == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
    Rational r(p, q);
    r.canonicalize();
    return r;
  }

  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = false;
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) {
      negative = whole.front() == '-';
      whole.remove_prefix(1);
    }
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac))) {
      throw ConfigError("not a decimal literal: '" + std::string(text) + "'");
    }
    Integer w = whole.empty() ? Integer(0) : Integer(std::string(whole), 10);
    Integer f = frac.empty() ? Integer(0) : Integer(std::string(frac), 10);
    Integer scale = pow10(static_cast<unsigned>(frac.size()));
    Rational r(w * scale + f, scale);
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }

  return Rational(parse_integer(text));
}

std::string to_string(const Rational& x) {
  Rational c(x);
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string to_string(const Integer& x) { return x.get_str(); }

unsigned decimal_places(std::string_view text) {
  if (text.find('/') != std::string_view::npos) return 0;
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return 0;
  auto end = text.find_last_not_of(" \t\n");
  return static_cast<unsigned>(end - dot);
}

std::string to_decimal(const Rational& x, int digits) {
  mpf_class f(x, 256);
  mp_exp_t exp = 0;
  std::string mant = f.get_str(exp, 10, static_cast<std::size_t>(digits));
  if (mant.empty() || mant == "0") return "0";
  bool negative = mant.front() == '-';
  if (negative) mant.erase(0, 1);
  std::string out = negative ? "-" : "";
  if (exp <= 0 && exp > -6) {
    out += "0." + std::string(static_cast<std::size_t>(-exp), '0') + mant;
    return out;
  }
  out += mant.substr(0, 1);
  if (mant.size() > 1) out += "." + mant.substr(1);
  out += "e" + std::to_string(static_cast<long>(exp) - 1);
  return out;
}

Integer floor(const Rational& x) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

Integer ceil(const Rational& x) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

Integer isqrt_ceil(const Integer& n) {
  if (n <= 0) return 0;
  Integer r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  if (r * r < n) ++r;
  return r;
}

Rational dist_to_nearest_int(const Rational& x) {
  Rational frac = x - Rational(floor(x));
  Rational other = Rational(1) - frac;
  return frac < other ? frac : other;
}

std::uint64_t weighted_height_sq(IntegerPair m) {
  const std::uint64_t a1 = m.m1 < 0 ? 0 - static_cast<std::uint64_t>(m.m1) : static_cast<std::uint64_t>(m.m1);
  const std::uint64_t a2 = m.m2 < 0 ? 0 - static_cast<std::uint64_t>(m.m2) : static_cast<std::uint64_t>(m.m2);
  if (a2 >= (std::uint64_t{1} << 31)) throw std::out_of_range("weighted_height_sq: |m2| too large");
  return std::max(a1, a2 * a2);
}

ThetaForm::ThetaForm(Rational theta1, Rational theta2, Rational declared_error)
    : theta1_(std::move(theta1)), theta2_(std::move(theta2)), declared_error_(std::move(declared_error)) {
  theta1_.canonicalize();
  theta2_.canonicalize();
  declared_error_.canonicalize();
  auto in_unit = [](const Rational& t) { return t > 0 && t < 1; };
  if (!in_unit(theta1_) || !in_unit(theta2_)) throw ConfigError("theta components must lie in (0, 1)");
  if (declared_error_ < 0 || declared_error_ >= Rational(1, 2)) {
    throw ConfigError("declared_error must lie in [0, 1/2)");
  }
}

FormValue form_value(const ThetaForm& theta, IntegerPair m) {
  if (m.is_zero()) throw std::invalid_argument("form_value: m must be nonzero");
  Rational x = theta.theta1() * Integer(static_cast<long>(m.m1)) + theta.theta2() * Integer(static_cast<long>(m.m2));
  Integer k = floor(x);
  Rational below = x - Rational(k);  // distance to k
  Rational above = Rational(1) - below;  // distance to k + 1
  FormValue out;
  if (below < above) {
    out.zeta = below;
    out.m0 = -k;
  } else if (above < below) {
    out.zeta = above;
    out.m0 = -(k + 1);
  } else {
    out.zeta = below;
    Integer a = -k;
    Integer b = -(k + 1);
    Integer abs_a = abs(a);
    Integer abs_b = abs(b);
    out.m0 = (abs_a < abs_b || (abs_a == abs_b && a < b)) ? a : b;
  }
  return out;
}

void validate_precision(const ThetaForm& theta, std::uint64_t height_sq_max, const Rational& zeta_min) {
  if (height_sq_max < 1) throw std::invalid_argument("validate_precision: height bound must be >= 1");
  const Rational& err = theta.declared_error();
  if (err == 0) return;
  Integer h(std::to_string(height_sq_max), 10);
  Rational slack = Rational(10) * (Rational(h) * err + Rational(isqrt_ceil(h)) * err);
  if (zeta_min > slack) return;

  // err must shrink by a factor of roughly slack / zeta_min.
  std::int64_t extra = 1;
  if (zeta_min > 0) {
    double ratio = Rational(slack / zeta_min).get_d();
    extra = static_cast<std::int64_t>(std::ceil(std::log10(ratio))) + 1;
  } else {
    extra = 0;
  }
  throw PrecisionExhausted("theta truncation too coarse for height bound " + std::to_string(height_sq_max) +
                               ": smallest zeta " + to_decimal(zeta_min, 6) + " does not exceed guard " +
                               to_decimal(slack, 6),
                           extra);
}

}  // namespace badtheta
