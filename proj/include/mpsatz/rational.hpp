#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace mpsatz {

using Rational = mpq_class;
using Integer = mpz_class;

/// Coefficient-type hooks shared by the exact (Rational) and numeric (double)
/// polynomial paths.
template <typename T>
struct CoeffTraits;

template <>
struct CoeffTraits<Rational> {
  static bool is_zero(const Rational& c) { return sgn(c) == 0; }
  static double to_double(const Rational& c) { return c.get_d(); }
  static Rational from_int(long v) { return Rational(v); }
  static Rational abs(const Rational& c) { return ::abs(c); }
};

template <>
struct CoeffTraits<double> {
  static bool is_zero(double c) { return c == 0.0; }
  static double to_double(double c) { return c; }
  static double from_int(long v) { return static_cast<double>(v); }
  static double abs(double c) { return std::fabs(c); }
};

template <typename To, typename From>
To coeff_cast(const From& c);

template <>
inline double coeff_cast<double, double>(const double& c) { return c; }
template <>
inline double coeff_cast<double, Rational>(const Rational& c) { return c.get_d(); }
template <>
inline Rational coeff_cast<Rational, Rational>(const Rational& c) { return c; }

/// Exact binary value of a finite double.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::domain_error("exact_rational: non-finite value");
  Rational q(x);
  q.canonicalize();
  return q;
}

template <>
inline Rational coeff_cast<Rational, double>(const double& c) { return exact_rational(c); }

/// Closest rational with denominator at most max_den (continued-fraction
/// convergents and the best semiconvergent).
inline Rational limit_denominator(const Rational& value, const Integer& max_den) {
  if (max_den < 1) throw std::invalid_argument("limit_denominator: max_den < 1");
  if (value.get_den() <= max_den) return value;
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Integer n = value.get_num(), d = value.get_den();
  while (true) {
    Integer a;
    mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    Integer q2 = q0 + a * q1;
    if (q2 > max_den) break;
    Integer p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Integer r = n - a * d;
    n = d;
    d = r;
    if (d == 0) break;
  }
  Integer k = (max_den - q0) / q1;
  Rational bound1(p0 + k * p1, q0 + k * q1);
  Rational bound2(p1, q1);
  bound1.canonicalize();
  bound2.canonicalize();
  return ::abs(bound2 - value) <= ::abs(bound1 - value) ? bound2 : bound1;
}

inline Rational round_rational(double x, const Integer& max_den) {
  return limit_denominator(exact_rational(x), max_den);
}

inline Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) throw std::invalid_argument("not a rational: " + text);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
  q.canonicalize();
  return q;
}

}  // namespace mpsatz
