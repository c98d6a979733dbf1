#include "polytrace/symmetric.h"

#include <map>
#include <vector>

#include "polytrace/combinatorics.h"
#include "polytrace/error.h"

namespace polytrace {

template <Scalar S>
S evaluate_symmetric(const Polynomial<S>& f, std::span<const Indeterminate> vars,
                     std::span<const S> esf_values) {
  const std::size_t p = vars.size();
  if (esf_values.size() != p) throw Error("need one elementary symmetric value per variable");
  if (f.has_umbrae()) throw Error("symmetric reduction needs an umbra-free polynomial");

  std::vector<Polynomial<S>> var_polys(vars.begin(), vars.end());
  std::vector<Polynomial<S>> esf_polys;
  for (unsigned k = 1; k <= p; ++k) esf_polys.push_back(esf_direct<Polynomial<S>>(var_polys, k));

  // Cached powers e_k^t as polynomials and as values.
  std::map<std::pair<std::size_t, unsigned>, Polynomial<S>> poly_pow;
  auto esf_power = [&](std::size_t k, unsigned t) -> const Polynomial<S>& {
    auto it = poly_pow.find({k, t});
    if (it == poly_pow.end()) it = poly_pow.emplace(std::pair{k, t}, pow(esf_polys[k], t)).first;
    return it->second;
  };

  auto exponents = [&](const MonomialKey& key) {
    std::vector<unsigned> a(p, 0);
    unsigned matched = 0;
    for (std::size_t k = 0; k < p; ++k) {
      a[k] = key.degree_in(vars[k].id());
      matched += a[k];
    }
    if (matched != key.total_indeterminate_degree())
      throw Error("symmetric reduction: polynomial involves other indeterminates");
    return a;
  };

  Polynomial<S> rest = f;
  S value = scalar_from_int<S>(0);
  while (!rest.is_zero()) {
    // Lexicographically largest exponent vector.
    const MonomialKey* lead = nullptr;
    std::vector<unsigned> lead_exp;
    for (const auto& [key, c] : rest.terms()) {
      auto a = exponents(key);
      if (lead == nullptr || a > lead_exp) {
        lead = &key;
        lead_exp = std::move(a);
      }
    }
    for (std::size_t k = 0; k + 1 < p; ++k)
      if (lead_exp[k] < lead_exp[k + 1]) throw Error("polynomial is not symmetric");

    const S coeff = rest.terms().at(*lead);
    Polynomial<S> term(coeff);
    S term_value = coeff;
    for (std::size_t k = 0; k < p; ++k) {
      const unsigned t = lead_exp[k] - (k + 1 < p ? lead_exp[k + 1] : 0);
      if (t == 0) continue;
      term *= esf_power(k, t);
      for (unsigned r = 0; r < t; ++r) term_value = S(term_value * esf_values[k]);
    }
    value += term_value;
    rest -= term;
  }
  return value;
}

template Rational evaluate_symmetric(const Polynomial<Rational>&, std::span<const Indeterminate>,
                                     std::span<const Rational>);
template double evaluate_symmetric(const Polynomial<double>&, std::span<const Indeterminate>,
                                   std::span<const double>);

}  // namespace polytrace
