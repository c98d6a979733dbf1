#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "polytrace/scalar.h"

namespace polytrace {

// Ring adapters so the generic routines below work over Rational, double
// and polynomial rings alike. Ring types other than the two scalars provide
// `static T from_integer(const Integer&)` and `T scaled(const Rational&)`.
namespace ring {

template <class T>
T from_integer(const Integer& v) {
  if constexpr (std::is_same_v<T, double>) {
    return v.get_d();
  } else if constexpr (std::is_same_v<T, Rational>) {
    return Rational(v);
  } else {
    return T::from_integer(v);
  }
}

template <class T>
T scale(const T& v, const Rational& r) {
  if constexpr (std::is_same_v<T, double>) {
    return v * r.get_d();
  } else if constexpr (std::is_same_v<T, Rational>) {
    return Rational(v * r);
  } else {
    return v.scaled(r);
  }
}

}  // namespace ring

/// Integer partition lambda = (1^{r_1} 2^{r_2} ...) stored as (part,
/// multiplicity) pairs with strictly increasing parts.
class Partition {
 public:
  struct Block {
    unsigned part;
    unsigned multiplicity;
    friend bool operator==(const Block&, const Block&) = default;
  };

  Partition() = default;
  /// Builds from an arbitrary list of positive parts (any order).
  static Partition from_parts(std::span<const unsigned> parts);

  const std::vector<Block>& blocks() const { return blocks_; }
  unsigned weight() const { return weight_; }
  /// Number of parts l(lambda) = sum of multiplicities.
  unsigned length() const;
  /// Multiplicity r_k of part k (0 when absent).
  unsigned multiplicity(unsigned part) const;
  /// Parts listed in increasing order with repetition, e.g. {1,1,2}.
  std::vector<unsigned> parts() const;
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<Block> blocks_;
  unsigned weight_ = 0;
};

/// All partitions of i, ordered lexicographically by their increasing part
/// lists. i = 0 yields the single empty partition.
std::vector<Partition> enumerate_partitions(unsigned i);

/// d_lambda = i! / (prod r_k! (k!)^{r_k}), the coefficient of the
/// monomial prod c_k^{r_k} in the complete Bell polynomial B_i.
Integer d_lambda(const Partition& lambda);

/// Number of permutations of {1..i} whose cycle class is lambda.
Integer s_lambda(const Partition& lambda);

using Matching = std::vector<std::pair<unsigned, unsigned>>;

/// All (m-1)!! perfect matchings of {0..m-1}. Pairs are (smaller, larger),
/// listed by their first element; the outer order is the depth-first order
/// pairing the lowest free element with each later one in turn.
/// Throws Error("no pair partition") for odd m.
std::vector<Matching> enumerate_pair_partitions(unsigned m);

/// Complete exponential Bell polynomial B_i(c_1..c_i) with i = c.size(),
/// computed by B_{k+1} = sum_j C(k,j) B_{k-j} c_{j+1}. `mul` lets callers
/// plug in a truncated product (see Polynomial::mul_pruned).
template <class T, class Mul = std::multiplies<T>>
T complete_bell(std::span<const T> c, Mul mul = Mul{}) {
  std::vector<T> bell;
  bell.reserve(c.size() + 1);
  bell.push_back(ring::from_integer<T>(Integer(1)));
  for (std::size_t k = 0; k < c.size(); ++k) {
    T next = ring::from_integer<T>(Integer(0));
    for (std::size_t j = 0; j <= k; ++j) {
      T term = mul(bell[k - j], c[j]);
      next = next + ring::scale(term, Rational(binomial(long(k), long(j))));
    }
    bell.push_back(std::move(next));
  }
  return bell.back();
}

/// Same polynomial written as the partition sum sum_{lambda |- i} d_lambda
/// prod c_k^{r_k}; kept as a second route for cross-checks.
template <class T>
T complete_bell_by_partitions(std::span<const T> c) {
  const auto i = static_cast<unsigned>(c.size());
  T total = ring::from_integer<T>(Integer(0));
  for (const auto& lambda : enumerate_partitions(i)) {
    T term = ring::from_integer<T>(d_lambda(lambda));
    for (const auto& b : lambda.blocks())
      for (unsigned r = 0; r < b.multiplicity; ++r) term = term * c[b.part - 1];
    total = total + term;
  }
  return total;
}

/// s_k = sum_j y_j^k.
template <class T>
T power_sum(std::span<const T> y, unsigned k) {
  T total = ring::from_integer<T>(Integer(0));
  for (const auto& v : y) {
    T pw = v;
    for (unsigned e = 1; e < k; ++e) pw = pw * v;
    total = total + pw;
  }
  return total;
}

/// e_i(y): sum over j_1 < ... < j_i of the products. e_0 = 1, e_i = 0 for
/// i > y.size().
template <class T>
T esf_direct(std::span<const T> y, unsigned i) {
  if (i > y.size()) return ring::from_integer<T>(Integer(0));
  // e[k] holds e_k of the prefix processed so far.
  std::vector<T> e(i + 1, ring::from_integer<T>(Integer(0)));
  e[0] = ring::from_integer<T>(Integer(1));
  for (const auto& v : y)
    for (unsigned k = i; k >= 1; --k) e[k] = e[k] + e[k - 1] * v;
  return e[i];
}

/// e_i via (1/i!) B_i(g_1 s_1, ..., g_i s_i), g_k = (-1)^{k-1} (k-1)!.
template <class T>
T esf_via_bell(std::span<const T> y, unsigned i) {
  std::vector<T> c;
  c.reserve(i);
  for (unsigned k = 1; k <= i; ++k) {
    Integer g = factorial(k - 1);
    if (k % 2 == 0) g = -g;
    c.push_back(ring::scale(power_sum(y, k), Rational(g)));
  }
  T b = complete_bell<T>(std::span<const T>(c));
  return ring::scale(b, Rational(Integer(1), factorial(i)));
}

/// mu(D_y)(tau) = prod_k s_k(y)^{r_k} for tau of cycle class lambda.
template <class T>
T joint_moment_of_diagonal(std::span<const T> y, const Partition& lambda) {
  T total = ring::from_integer<T>(Integer(1));
  for (const auto& b : lambda.blocks()) {
    const T s = power_sum(y, b.part);
    for (unsigned r = 0; r < b.multiplicity; ++r) total = total * s;
  }
  return total;
}

/// e_i via the cycle-class sum
/// (1/i!) sum_{lambda |- i} s_lambda (-1)^{i - l(lambda)} mu(D_y)(lambda).
template <class T>
T esf_via_cycle_classes(std::span<const T> y, unsigned i) {
  T total = ring::from_integer<T>(Integer(0));
  for (const auto& lambda : enumerate_partitions(i)) {
    Integer coeff = s_lambda(lambda);
    if ((i - lambda.length()) % 2 == 1) coeff = -coeff;
    total = total + ring::scale(joint_moment_of_diagonal(y, lambda), Rational(coeff));
  }
  return ring::scale(total, Rational(Integer(1), factorial(i)));
}

/// Raw moments m_1..m_K from cumulants k_1..k_K: m_k = B_k(k_1, ..., k_k).
template <class T>
std::vector<T> moments_from_cumulants(std::span<const T> kappa) {
  std::vector<T> out;
  for (std::size_t k = 1; k <= kappa.size(); ++k) out.push_back(complete_bell<T>(kappa.first(k)));
  return out;
}

/// Inverse of the Bell map:
/// k_n = m_n - sum_{j=1}^{n-1} C(n-1, j-1) k_j m_{n-j}.
template <class T>
std::vector<T> cumulants_from_moments(std::span<const T> moments) {
  std::vector<T> kappa;
  for (std::size_t n = 1; n <= moments.size(); ++n) {
    T value = moments[n - 1];
    for (std::size_t j = 1; j < n; ++j)
      value = value - ring::scale(T(kappa[j - 1] * moments[n - j - 1]),
                                  Rational(binomial(long(n - 1), long(j - 1))));
    kappa.push_back(value);
  }
  return kappa;
}

}  // namespace polytrace
