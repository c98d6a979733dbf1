#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace polytrace {

using Integer = mpz_class;
using Rational = mpq_class;

// Scalar modes: exact rationals, or doubles for inputs with irrational
// factors. A single computation never mixes the two.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static bool is_zero(const Rational& v) { return sgn(v) == 0; }
  static Rational from_rational(const Rational& v) { return v; }
  static double to_double(const Rational& v) { return v.get_d(); }
  static std::string to_string(const Rational& v) { return v.get_str(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static bool is_zero(double v) { return v == 0.0; }
  static double from_rational(const Rational& v) { return v.get_d(); }
  static double to_double(double v) { return v; }
  static std::string to_string(double v);
};

template <class S>
concept Scalar = requires { ScalarTraits<S>::exact; };

template <Scalar S>
S scalar_from_int(long v) {
  return ScalarTraits<S>::from_rational(Rational(v));
}

/// num / den in lowest terms (mpq_class(num, den) alone does not reduce).
inline Rational ratio(const Integer& num, const Integer& den) {
  Rational out(num, den);
  out.canonicalize();
  return out;
}

/// Parses "3", "-1/4", "0.125" or "1e-3". Decimal literals are read
/// exactly (0.1 becomes 1/10). Throws Error on malformed input.
Rational parse_rational(const std::string& text);

Integer factorial(unsigned k);

/// n (n-1) ... (n-k+1); (n)_0 = 1 and (n)_k = 0 when k > n >= 0.
Integer falling_factorial(long n, unsigned k);

Integer binomial(long n, long k);

}  // namespace polytrace
