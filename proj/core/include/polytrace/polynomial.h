#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "polytrace/scalar.h"
#include "polytrace/symbol.h"

namespace polytrace {

struct Power {
  SymbolId id;
  unsigned exponent;
  friend auto operator<=>(const Power&, const Power&) = default;
};

/// Umbral and ordinary parts of a monomial, each sorted by id with no zero
/// exponents. Multiplying keys adds exponents id by id, so alpha * alpha
/// becomes alpha^2 (one moment lookup) rather than two factors.
struct MonomialKey {
  std::vector<Power> umbrae;
  std::vector<Power> indeterminates;

  bool is_constant() const { return umbrae.empty() && indeterminates.empty(); }
  unsigned degree_in(SymbolId indeterminate) const;
  unsigned total_indeterminate_degree() const;

  friend MonomialKey operator*(const MonomialKey& a, const MonomialKey& b);
  friend auto operator<=>(const MonomialKey&, const MonomialKey&) = default;
};

/// Element of S[x_1, x_2, ...][A]: a sparse combination of monomials in
/// indeterminates and umbrae. Canonical: no zero coefficients, so equality
/// of polynomials is equality of term maps.
template <Scalar S>
class Polynomial {
 public:
  using scalar_type = S;
  using Terms = std::map<MonomialKey, S>;

  Polynomial() = default;
  Polynomial(const S& constant);  // NOLINT(google-explicit-constructor)
  Polynomial(const Umbra& u);  // NOLINT(google-explicit-constructor)
  Polynomial(const Indeterminate& x);  // NOLINT(google-explicit-constructor)

  static Polynomial from_integer(const Integer& v);
  static Polynomial constant(const Rational& v);
  static Polynomial monomial(MonomialKey key, const S& coefficient);

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool has_umbrae() const;
  /// Ids of the umbrae occurring with positive power.
  std::set<SymbolId> umbral_support() const;
  /// Value if the polynomial is a constant (zero included).
  std::optional<S> as_constant() const;
  /// Coefficient of the given monomial (zero when absent).
  S coefficient(const MonomialKey& key) const;

  void add_term(const MonomialKey& key, const S& coefficient);

  Polynomial scaled(const Rational& r) const;
  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out = a;
    out *= b;
    return out;
  }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Human-readable form with monomials sorted by degree and then by text,
  /// explicit exponents, umbrae printed as name#id. Zero prints as "0".
  std::string to_string() const;

 private:
  Terms terms_;
};

template <Scalar S>
Polynomial<S> pow(const Polynomial<S>& p, unsigned k);

/// Drops every monomial that evaluates to zero whatever it is later
/// multiplied by: some umbra power reaches its vanishing order (singleton
/// power >= 2, delta power >= 3, falling(n) power > n).
template <Scalar S>
Polynomial<S> prune(const Polynomial<S>& p);

/// a * b followed by prune, without materializing the pruned monomials.
/// eval(mul_pruned(a, b) * c) == eval(a * b * c) for every c.
template <Scalar S>
Polynomial<S> mul_pruned(const Polynomial<S>& a, const Polynomial<S>& b);

/// The evaluation operator E: linear, passes indeterminates through and
/// replaces the umbral part of each monomial by the product of the
/// moments a_{exponent} over its distinct umbrae. The result has no umbrae.
template <Scalar S>
Polynomial<S> eval(const Polynomial<S>& p);

/// Replaces `x` by `replacement` (a ring homomorphism). Substituting an
/// umbra introduces its id, whose powers then accumulate under products.
template <Scalar S>
Polynomial<S> substitute(const Polynomial<S>& p, const Indeterminate& x,
                         const Polynomial<S>& replacement);

/// Simultaneous substitution of several indeterminates.
template <Scalar S>
Polynomial<S> substitute(const Polynomial<S>& p,
                         const std::unordered_map<SymbolId, Polynomial<S>>& replacements);

/// Truncated generating function f(nu, z) = E[exp(nu z)]:
/// [E(nu^0)/0!, E(nu^1)/1!, ..., E(nu^order)/order!]. Coefficients are
/// polynomials in whatever indeterminates nu carries.
template <Scalar S>
std::vector<Polynomial<S>> gf_coefficients(const Polynomial<S>& nu, unsigned order);

/// Moment-wise similarity up to `order`: eval(nu^k) == eval(mu^k), k <= order.
template <Scalar S>
bool similar(const Polynomial<S>& nu, const Polynomial<S>& mu, unsigned order);

extern template class Polynomial<Rational>;
extern template class Polynomial<double>;

using RationalPolynomial = Polynomial<Rational>;
using FloatPolynomial = Polynomial<double>;

}  // namespace polytrace
