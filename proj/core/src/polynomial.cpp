#include "polytrace/polynomial.h"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <utility>

#include "polytrace/combinatorics.h"
#include "polytrace/error.h"

namespace polytrace {

namespace {

std::vector<Power> merge_powers(const std::vector<Power>& a, const std::vector<Power>& b) {
  std::vector<Power> out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->id < ib->id) {
      out.push_back(*ia++);
    } else if (ib->id < ia->id) {
      out.push_back(*ib++);
    } else {
      out.push_back({ia->id, ia->exponent + ib->exponent});
      ++ia;
      ++ib;
    }
  }
  out.insert(out.end(), ia, a.end());
  out.insert(out.end(), ib, b.end());
  return out;
}

// Looks up vanishing orders once per call instead of once per monomial.
class VanishingCache {
 public:
  bool vanishes(const std::vector<Power>& umbrae) {
    for (const auto& pw : umbrae) {
      auto it = cache_.find(pw.id);
      if (it == cache_.end()) it = cache_.emplace(pw.id, Umbra::from_id(pw.id).vanishing_order()).first;
      if (it->second && pw.exponent >= *it->second) return true;
    }
    return false;
  }

 private:
  std::unordered_map<SymbolId, std::optional<unsigned>> cache_;
};

// Natural ordering so that y_2 sorts before y_10.
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      std::size_t ei = i;
      std::size_t ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      const std::string na = a.substr(i, ei - i);
      const std::string nb = b.substr(j, ej - j);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return (a.size() - i) < (b.size() - j);
}

std::string render_factors(const MonomialKey& key) {
  std::vector<std::string> umbral;
  std::vector<std::string> ordinary;
  auto with_exp = [](std::string s, unsigned e) {
    return e == 1 ? s : s + "^" + std::to_string(e);
  };
  for (const auto& pw : key.umbrae) umbral.push_back(with_exp(umbra_label(pw.id), pw.exponent));
  for (const auto& pw : key.indeterminates)
    ordinary.push_back(with_exp(indeterminate_name(pw.id), pw.exponent));
  std::sort(umbral.begin(), umbral.end(), natural_less);
  std::sort(ordinary.begin(), ordinary.end(), natural_less);
  std::string out;
  for (const auto& part : {umbral, ordinary})
    for (const auto& f : part) {
      if (!out.empty()) out += "*";
      out += f;
    }
  return out;
}

}  // namespace

unsigned MonomialKey::degree_in(SymbolId indeterminate) const {
  for (const auto& pw : indeterminates)
    if (pw.id == indeterminate) return pw.exponent;
  return 0;
}

unsigned MonomialKey::total_indeterminate_degree() const {
  unsigned d = 0;
  for (const auto& pw : indeterminates) d += pw.exponent;
  return d;
}

MonomialKey operator*(const MonomialKey& a, const MonomialKey& b) {
  return {merge_powers(a.umbrae, b.umbrae), merge_powers(a.indeterminates, b.indeterminates)};
}

template <Scalar S>
Polynomial<S>::Polynomial(const S& constant) {
  add_term(MonomialKey{}, constant);
}

template <Scalar S>
Polynomial<S>::Polynomial(const Umbra& u) {
  terms_.emplace(MonomialKey{{{u.id(), 1}}, {}}, scalar_from_int<S>(1));
}

template <Scalar S>
Polynomial<S>::Polynomial(const Indeterminate& x) {
  terms_.emplace(MonomialKey{{}, {{x.id(), 1}}}, scalar_from_int<S>(1));
}

template <Scalar S>
Polynomial<S> Polynomial<S>::from_integer(const Integer& v) {
  return Polynomial(ScalarTraits<S>::from_rational(Rational(v)));
}

template <Scalar S>
Polynomial<S> Polynomial<S>::constant(const Rational& v) {
  return Polynomial(ScalarTraits<S>::from_rational(v));
}

template <Scalar S>
Polynomial<S> Polynomial<S>::monomial(MonomialKey key, const S& coefficient) {
  Polynomial out;
  out.add_term(key, coefficient);
  return out;
}

template <Scalar S>
bool Polynomial<S>::has_umbrae() const {
  for (const auto& [key, c] : terms_)
    if (!key.umbrae.empty()) return true;
  return false;
}

template <Scalar S>
std::set<SymbolId> Polynomial<S>::umbral_support() const {
  std::set<SymbolId> out;
  for (const auto& [key, c] : terms_)
    for (const auto& pw : key.umbrae) out.insert(pw.id);
  return out;
}

template <Scalar S>
std::optional<S> Polynomial<S>::as_constant() const {
  if (terms_.empty()) return scalar_from_int<S>(0);
  if (terms_.size() == 1 && terms_.begin()->first.is_constant()) return terms_.begin()->second;
  return std::nullopt;
}

template <Scalar S>
S Polynomial<S>::coefficient(const MonomialKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? scalar_from_int<S>(0) : it->second;
}

template <Scalar S>
void Polynomial<S>::add_term(const MonomialKey& key, const S& coefficient) {
  if (ScalarTraits<S>::is_zero(coefficient)) return;
  auto [it, inserted] = terms_.try_emplace(key, coefficient);
  if (inserted) return;
  it->second += coefficient;
  if (ScalarTraits<S>::is_zero(it->second)) terms_.erase(it);
}

template <Scalar S>
Polynomial<S> Polynomial<S>::scaled(const Rational& r) const {
  Polynomial out;
  const S factor = ScalarTraits<S>::from_rational(r);
  for (const auto& [key, c] : terms_) out.add_term(key, S(c * factor));
  return out;
}

template <Scalar S>
Polynomial<S> Polynomial<S>::operator-() const {
  Polynomial out = *this;
  for (auto& [key, c] : out.terms_) c = -c;
  return out;
}

template <Scalar S>
Polynomial<S>& Polynomial<S>::operator+=(const Polynomial& o) {
  for (const auto& [key, c] : o.terms_) add_term(key, c);
  return *this;
}

template <Scalar S>
Polynomial<S>& Polynomial<S>::operator-=(const Polynomial& o) {
  for (const auto& [key, c] : o.terms_) add_term(key, S(-c));
  return *this;
}

template <Scalar S>
Polynomial<S>& Polynomial<S>::operator*=(const Polynomial& o) {
  Polynomial out;
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : o.terms_) out.add_term(ka * kb, S(ca * cb));
  *this = std::move(out);
  return *this;
}

template <Scalar S>
std::string Polynomial<S>::to_string() const {
  if (terms_.empty()) return "0";
  struct Rendered {
    unsigned degree;
    std::string factors;
    S coefficient;
  };
  std::vector<Rendered> items;
  items.reserve(terms_.size());
  for (const auto& [key, c] : terms_) {
    unsigned deg = key.total_indeterminate_degree();
    for (const auto& pw : key.umbrae) deg += pw.exponent;
    items.push_back({deg, render_factors(key), c});
  }
  std::sort(items.begin(), items.end(), [](const Rendered& a, const Rendered& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    return natural_less(a.factors, b.factors);
  });
  std::ostringstream os;
  bool first = true;
  for (const auto& item : items) {
    const bool negative = item.coefficient < 0;
    const S magnitude = negative ? S(-item.coefficient) : item.coefficient;
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    const bool unit = magnitude == scalar_from_int<S>(1);
    if (item.factors.empty()) {
      os << ScalarTraits<S>::to_string(magnitude);
    } else {
      if (!unit) os << ScalarTraits<S>::to_string(magnitude) << "*";
      os << item.factors;
    }
  }
  return os.str();
}

template <Scalar S>
Polynomial<S> pow(const Polynomial<S>& p, unsigned k) {
  Polynomial<S> result(scalar_from_int<S>(1));
  Polynomial<S> base = p;
  while (k > 0) {
    if (k & 1U) result *= base;
    k >>= 1U;
    if (k > 0) base *= base;
  }
  return result;
}

template <Scalar S>
Polynomial<S> prune(const Polynomial<S>& p) {
  VanishingCache cache;
  Polynomial<S> out;
  for (const auto& [key, c] : p.terms())
    if (!cache.vanishes(key.umbrae)) out.add_term(key, c);
  return out;
}

template <Scalar S>
Polynomial<S> mul_pruned(const Polynomial<S>& a, const Polynomial<S>& b) {
  VanishingCache cache;
  Polynomial<S> out;
  for (const auto& [ka, ca] : a.terms()) {
    if (cache.vanishes(ka.umbrae)) continue;
    for (const auto& [kb, cb] : b.terms()) {
      std::vector<Power> umbrae = merge_powers(ka.umbrae, kb.umbrae);
      if (cache.vanishes(umbrae)) continue;
      out.add_term(MonomialKey{std::move(umbrae), merge_powers(ka.indeterminates, kb.indeterminates)},
                   S(ca * cb));
    }
  }
  return out;
}

template <Scalar S>
Polynomial<S> eval(const Polynomial<S>& p) {
  VanishingCache cache;
  std::map<std::pair<SymbolId, unsigned>, S> moments;
  Polynomial<S> out;
  for (const auto& [key, c] : p.terms()) {
    // Zero rules first: most monomials in the Wishart routes die here.
    if (cache.vanishes(key.umbrae)) continue;
    S value = c;
    for (const auto& pw : key.umbrae) {
      auto it = moments.find({pw.id, pw.exponent});
      if (it == moments.end())
        it = moments
                 .emplace(std::pair{pw.id, pw.exponent},
                          ScalarTraits<S>::from_rational(Umbra::from_id(pw.id).moment(pw.exponent)))
                 .first;
      value = S(value * it->second);
      if (ScalarTraits<S>::is_zero(value)) break;
    }
    out.add_term(MonomialKey{{}, key.indeterminates}, value);
  }
  return out;
}

template <Scalar S>
Polynomial<S> substitute(const Polynomial<S>& p,
                         const std::unordered_map<SymbolId, Polynomial<S>>& replacements) {
  // Powers of each replacement, grown on demand.
  std::unordered_map<SymbolId, std::vector<Polynomial<S>>> powers;
  auto power_of = [&](SymbolId id, unsigned e) -> const Polynomial<S>& {
    auto& list = powers[id];
    if (list.empty()) list.emplace_back(scalar_from_int<S>(1));
    while (list.size() <= e) list.push_back(list.back() * replacements.at(id));
    return list[e];
  };
  Polynomial<S> out;
  for (const auto& [key, c] : p.terms()) {
    MonomialKey kept{key.umbrae, {}};
    std::vector<const Polynomial<S>*> factors;
    for (const auto& pw : key.indeterminates) {
      if (replacements.count(pw.id))
        factors.push_back(&power_of(pw.id, pw.exponent));
      else
        kept.indeterminates.push_back(pw);
    }
    Polynomial<S> term = Polynomial<S>::monomial(std::move(kept), c);
    for (const auto* f : factors) term *= *f;
    out += term;
  }
  return out;
}

template <Scalar S>
Polynomial<S> substitute(const Polynomial<S>& p, const Indeterminate& x,
                         const Polynomial<S>& replacement) {
  return substitute(p, std::unordered_map<SymbolId, Polynomial<S>>{{x.id(), replacement}});
}

template <Scalar S>
std::vector<Polynomial<S>> gf_coefficients(const Polynomial<S>& nu, unsigned order) {
  std::vector<Polynomial<S>> out;
  out.reserve(order + 1);
  Polynomial<S> power(scalar_from_int<S>(1));
  for (unsigned k = 0; k <= order; ++k) {
    if (k > 0) power = mul_pruned(power, nu);
    out.push_back(eval(power).scaled(Rational(Integer(1), factorial(k))));
  }
  return out;
}

template <Scalar S>
bool similar(const Polynomial<S>& nu, const Polynomial<S>& mu, unsigned order) {
  if (order == 0) throw Error("similarity needs order >= 1");
  Polynomial<S> pn(scalar_from_int<S>(1));
  Polynomial<S> pm(scalar_from_int<S>(1));
  for (unsigned k = 1; k <= order; ++k) {
    pn = mul_pruned(pn, nu);
    pm = mul_pruned(pm, mu);
    if (!(eval(pn) == eval(pm))) return false;
  }
  return true;
}

#define POLYTRACE_INSTANTIATE(S)                                                            \
  template class Polynomial<S>;                                                            \
  template Polynomial<S> pow(const Polynomial<S>&, unsigned);                              \
  template Polynomial<S> prune(const Polynomial<S>&);                                      \
  template Polynomial<S> mul_pruned(const Polynomial<S>&, const Polynomial<S>&);           \
  template Polynomial<S> eval(const Polynomial<S>&);                                       \
  template Polynomial<S> substitute(const Polynomial<S>&, const Indeterminate&,            \
                                    const Polynomial<S>&);                                 \
  template Polynomial<S> substitute(const Polynomial<S>&,                                  \
                                    const std::unordered_map<SymbolId, Polynomial<S>>&);   \
  template std::vector<Polynomial<S>> gf_coefficients(const Polynomial<S>&, unsigned);     \
  template bool similar(const Polynomial<S>&, const Polynomial<S>&, unsigned);

POLYTRACE_INSTANTIATE(Rational)
POLYTRACE_INSTANTIATE(double)

#undef POLYTRACE_INSTANTIATE

}  // namespace polytrace
