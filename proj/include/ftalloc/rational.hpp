#pragma once

// Exact rational arithmetic helpers on top of GMP's C++ interface, plus a few
// directed-rounding bounds computed with MPFR.

#include <gmpxx.h>
#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftalloc/errors.hpp"

namespace ftalloc {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline std::string to_string(std::span<const Rational> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += to_string(v[i]);
  }
  return out + ")";
}

// Round to nearest; get_d truncates, which prints 9/10 as 0.8999...
inline double to_double(const Rational& r) {
  mpfr_t t;
  mpfr_init2(t, 53);
  mpfr_set_q(t, r.get_mpq_t(), MPFR_RNDN);
  double d = mpfr_get_d(t, MPFR_RNDN);
  mpfr_clear(t);
  return d;
}

inline std::vector<double> to_doubles(std::span<const Rational> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

inline Integer floor_int(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline Integer ceil_int(const Rational& r) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline Rational pow_int(const Rational& base, unsigned long exp) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exp);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exp);
  return Rational(num, den);
}

// ceil(base^(base/2)); exact, also for odd base where the power is irrational.
inline Integer ceil_self_half_power(unsigned long base) {
  Integer full;
  mpz_ui_pow_ui(full.get_mpz_t(), base, base);
  Integer root;
  mpz_sqrt(root.get_mpz_t(), full.get_mpz_t());
  if (root * root != full) root += 1;
  return root;
}

// Best rational approximation with bounded denominator (continued fractions,
// including semiconvergents). The input is taken exactly as a binary double.
inline Rational limit_denominator(const Rational& x, const Integer& max_den) {
  if (x.get_den() <= max_den) return x;
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Integer n = x.get_num(), d = x.get_den();
  while (true) {
    Integer a;
    mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    Integer q2 = q0 + a * q1;
    if (q2 > max_den) break;
    Integer p2 = p0 + a * p1;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Integer rem = n - a * d;
    n = d;
    d = rem;
    if (d == 0) break;
  }
  Integer k;
  mpz_fdiv_q(k.get_mpz_t(), Integer(max_den - q0).get_mpz_t(), q1.get_mpz_t());
  Rational bound1(p0 + k * p1, q0 + k * q1);
  Rational bound2(p1, q1);
  bound1.canonicalize();
  bound2.canonicalize();
  Rational e1 = abs(bound1 - x), e2 = abs(bound2 - x);
  return (e2 <= e1) ? bound2 : bound1;
}

inline Rational rational_from_double(double v, long max_den = 1'000'000) {
  if (!std::isfinite(v)) throw InvalidInput("non-finite number");
  Rational exact(v);
  return limit_denominator(exact, Integer(max_den));
}

// Accepts "a", "a/b", and plain decimals such as "0.125" or "-3.5e-2".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw InvalidInput("empty rational literal");

  auto all_digits = [](std::string_view t, bool allow_sign) {
    if (allow_sign && !t.empty() && (t[0] == '-' || t[0] == '+')) t.remove_prefix(1);
    if (t.empty()) return false;
    for (char c : t)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };

  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num, true) || !all_digits(den, false))
      throw InvalidInput("malformed rational '" + s + "'");
    if (num[0] == '+') num.erase(0, 1);
    Integer d(den, 10);
    if (d == 0) throw InvalidInput("zero denominator in '" + s + "'");
    Rational r{Integer(num, 10), d};
    r.canonicalize();
    return r;
  }

  std::string mant = s;
  long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mant = s.substr(0, e);
    std::string ex = s.substr(e + 1);
    if (!all_digits(ex, true)) throw InvalidInput("malformed exponent in '" + s + "'");
    exp10 = std::stol(ex);
  }
  bool neg = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    mant.erase(0, 1);
  }
  std::string digits;
  if (auto dot = mant.find('.'); dot != std::string::npos) {
    std::string ip = mant.substr(0, dot), fp = mant.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip, false)) ||
        (!fp.empty() && !all_digits(fp, false)))
      throw InvalidInput("malformed decimal '" + s + "'");
    digits = ip + fp;
    exp10 -= static_cast<long>(fp.size());
  } else {
    if (!all_digits(mant, false)) throw InvalidInput("malformed number '" + s + "'");
    digits = mant;
  }
  if (digits.empty()) digits = "0";
  Rational r{Integer(digits, 10)};
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  if (exp10 >= 0)
    r *= scale;
  else
    r /= scale;
  if (neg) r = -r;
  r.canonicalize();
  return r;
}

namespace detail {

// RAII wrapper around an mpfr_t.
class Mpfr {
public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

private:
  mpfr_t v_;
};

inline Rational mpfr_to_rational(const Mpfr& m) {
  Rational out;
  mpfr_get_q(out.get_mpq_t(), m.get());
  return out;
}

} // namespace detail

// Rational r with r >= sqrt(x), tight to `prec` bits.
inline Rational sqrt_upper(const Rational& x, mpfr_prec_t prec = 64) {
  if (x < 0) throw InvalidInput("sqrt of negative value");
  detail::Mpfr v(prec);
  mpfr_set_q(v.get(), x.get_mpq_t(), MPFR_RNDU);
  mpfr_sqrt(v.get(), v.get(), MPFR_RNDU);
  return detail::mpfr_to_rational(v);
}

// Rational r with r >= sqrt(ln(x) * a) for x >= 1, a >= 0.
inline Rational sqrt_log_product_upper(const Rational& x, const Rational& a,
                                       mpfr_prec_t prec = 64) {
  if (x < 1 || a < 0) throw InvalidInput("sqrt_log_product_upper: out of domain");
  detail::Mpfr v(prec), f(prec);
  mpfr_set_q(v.get(), x.get_mpq_t(), MPFR_RNDU);
  mpfr_log(v.get(), v.get(), MPFR_RNDU);
  mpfr_set_q(f.get(), a.get_mpq_t(), MPFR_RNDU);
  mpfr_mul(v.get(), v.get(), f.get(), MPFR_RNDU);
  mpfr_sqrt(v.get(), v.get(), MPFR_RNDU);
  return detail::mpfr_to_rational(v);
}

inline Rational sum(std::span<const Rational> v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

} // namespace ftalloc
