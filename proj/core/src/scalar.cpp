#include "polytrace/scalar.h"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "polytrace/error.h"

namespace polytrace {

std::string ScalarTraits<double>::to_string(double v) {
  // Shortest representation that round-trips.
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Rational parse_decimal(const std::string& text) {
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    std::string exp_part = s.substr(e + 1);
    s.resize(e);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part[0] == '+' || exp_part[0] == '-')) {
      exp_negative = exp_part[0] == '-';
      exp_part.erase(0, 1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6)
      throw Error("malformed number '" + text + "'");
    exponent = std::stol(exp_part);
    if (exp_negative) exponent = -exponent;
  }
  std::string digits = s;
  if (auto dot = s.find('.'); dot != std::string::npos) {
    digits = s.substr(0, dot) + s.substr(dot + 1);
    exponent -= static_cast<long>(s.size() - dot - 1);
  }
  if (!all_digits(digits)) throw Error("malformed number '" + text + "'");
  Rational value(Integer(digits, 10));
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent >= 0)
    value *= ten_pow;
  else
    value /= ten_pow;
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  if (text.empty()) throw Error("empty number");
  if (auto slash = text.find('/'); slash != std::string::npos) {
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (sgn(den) == 0) throw Error("zero denominator in '" + raw + "'");
    return Rational(num / den);
  }
  return parse_decimal(text);
}

Integer factorial(unsigned k) {
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), k);
  return out;
}

Integer falling_factorial(long n, unsigned k) {
  Integer out = 1;
  for (unsigned j = 0; j < k; ++j) out *= (n - static_cast<long>(j));
  return out;
}

Integer binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

}  // namespace polytrace
