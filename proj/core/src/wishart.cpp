#include "polytrace/wishart.h"

#include <unordered_map>

#include "polytrace/combinatorics.h"
#include "polytrace/error.h"
#include "polytrace/symmetric.h"

namespace polytrace {

namespace {

template <Scalar S>
std::optional<S> scaled_identity_factor(const Matrix<S>& sigma) {
  if (!sigma.is_square() || !is_diagonal(sigma)) return std::nullopt;
  for (std::size_t k = 1; k < sigma.rows(); ++k)
    if (sigma(k, k) != sigma(0, 0)) return std::nullopt;
  return sigma(0, 0);
}

template <Scalar S>
S divide_by_factorial(const S& v, unsigned i) {
  return ring::scale(v, Rational(Integer(1), factorial(i)));
}

template <Scalar S>
S integer_scalar(const Integer& v) {
  return ScalarTraits<S>::from_rational(Rational(v));
}

template <Scalar S>
Matrix<S> mean_gram(const WishartParams<S>& params) {
  return matmul(params.mean, transpose(params.mean));
}

template <Scalar S>
EsfValue make_value(Regime regime, const S& v) {
  EsfValue out;
  out.regime = regime;
  out.value = ScalarTraits<S>::to_double(v);
  if constexpr (ScalarTraits<S>::exact) out.exact = v;
  return out;
}

// i! E[Tr_i] after rotating to Sigma = I and M = D_m, with D_m from the SVD
// of Sigma^{-1/2} M; multiplied by det(Sigma) and divided by i!. This is the
// i = p route, also applied to each principal block in the general route.
double full_rank_route(const WishartParams<double>& params) {
  const unsigned p = params.p();
  const Matrix<double> whitened = matmul(inverse_sqrt_spd(params.sigma), params.mean);
  const auto dec = svd(whitened);
  if (orthogonality_error(dec.left) > kOrthogonalityTolerance ||
      orthogonality_error(dec.right) > kOrthogonalityTolerance)
    throw Error("svd factors failed the orthogonality check");
  const auto dm = Matrix<double>::rect_diag(dec.values, p, params.n);
  const auto moment = umbral_frame_moment<double>(params.n, lift(Matrix<double>::identity(p)), lift(dm), p);
  return determinant(params.sigma) * divide_by_factorial(*moment.as_constant(), p);
}

template <Scalar S>
EsfValue umbral_route(const WishartParams<S>& params, unsigned i) {
  params.validate();
  const unsigned p = params.p();
  const unsigned n = params.n;
  if (i == 0) return make_value(Regime::trivial, scalar_from_int<S>(1));
  if (i > p) return make_value(Regime::trivial, scalar_from_int<S>(0));

  if (is_zero_matrix(params.mean)) {
    const UmbralMatrix<S> zero_mean(p, n);
    if (is_diagonal(params.sigma)) {
      const auto moment = umbral_frame_moment<S>(n, lift(params.sigma), zero_mean, i);
      return make_value(Regime::central, divide_by_factorial(*moment.as_constant(), i));
    }
    // Rotate to the eigenbasis with the eigenvalues kept symbolic; the
    // result is symmetric in theta and is read off the principal minors.
    const auto theta = Indeterminate::family("theta", p);
    std::vector<Polynomial<S>> theta_polys(theta.begin(), theta.end());
    const auto moment = umbral_frame_moment<S>(n, UmbralMatrix<S>::diagonal(theta_polys), zero_mean, i);
    std::vector<S> esf_values;
    for (unsigned k = 1; k <= p; ++k) esf_values.push_back(principal_minor_sum(params.sigma, k));
    const S value = evaluate_symmetric(moment, std::span<const Indeterminate>(theta),
                                       std::span<const S>(esf_values));
    return make_value(Regime::central, divide_by_factorial(value, i));
  }

  if (auto sigma2 = scaled_identity_factor(params.sigma)) {
    if (is_diagonal(params.mean)) {
      const auto moment = umbral_frame_moment<S>(n, lift(params.sigma), lift(params.mean), i);
      return make_value(Regime::scaled_identity, divide_by_factorial(*moment.as_constant(), i));
    }
    const auto dec = svd(to_double(params.mean));
    if (orthogonality_error(dec.left) > kOrthogonalityTolerance ||
        orthogonality_error(dec.right) > kOrthogonalityTolerance)
      throw Error("svd factors failed the orthogonality check");
    const auto dm = Matrix<double>::rect_diag(dec.values, p, n);
    const auto moment = umbral_frame_moment<double>(n, lift(to_double(params.sigma)), lift(dm), i);
    return make_value(Regime::scaled_identity, divide_by_factorial(*moment.as_constant(), i));
  }

  const WishartParams<double> fparams{n, to_double(params.sigma), to_double(params.mean)};
  if (i == p) return make_value(Regime::full_rank, full_rank_route(fparams));

  // Tr_i(W) = sum_J det(W_J); each block W_J is Wishart with covariance
  // Sigma_J and mean rows M_J, handled by the i = p route.
  double total = 0.0;
  for (const auto& idx : index_subsets(p, i)) {
    const std::span<const std::size_t> rows(idx);
    const WishartParams<double> block{n, principal_submatrix(fparams.sigma, rows),
                                      row_submatrix(fparams.mean, rows)};
    total += full_rank_route(block);
  }
  return make_value(Regime::submatrix, total);
}

}  // namespace

template <Scalar S>
WishartParams<S> WishartParams<S>::make(unsigned n, Matrix<S> sigma, std::optional<Matrix<S>> mean) {
  WishartParams out;
  out.n = n;
  out.mean = mean ? std::move(*mean) : Matrix<S>(sigma.rows(), n);
  out.sigma = std::move(sigma);
  out.validate();
  return out;
}

template <Scalar S>
void WishartParams<S>::validate() const {
  if (sigma.rows() == 0 || !sigma.is_square()) throw Error("sigma must be a nonempty square matrix");
  if (n < p()) throw Error("degrees of freedom n must be at least p");
  if (mean.rows() != p() || mean.cols() != n) throw Error("mean must be a p x n matrix");
  if (!is_symmetric(sigma)) throw Error("sigma is not symmetric");
  if (!is_positive_definite(sigma)) throw Error("sigma is not positive definite");
}

template <Scalar S>
TraceModel<S> TraceModel<S>::symbolic(const UmbralMatrix<S>& sigma, const UmbralMatrix<S>& mean,
                                      const std::string& y_name, const std::string& x_name) {
  if (!sigma.is_square() || mean.rows() != sigma.rows())
    throw Error("trace model needs a p x p sigma and a p x n mean");
  TraceModel out{sigma, mean, {}, {}};
  for (const auto& y : Indeterminate::family(y_name, static_cast<unsigned>(sigma.rows())))
    out.y.emplace_back(y);
  for (const auto& x : Indeterminate::family(x_name, static_cast<unsigned>(mean.cols())))
    out.x.emplace_back(x);
  return out;
}

template <Scalar S>
TraceModel<S> TraceModel<S>::symbolic(const WishartParams<S>& params) {
  return symbolic(lift(params.sigma), lift(params.mean));
}

template <Scalar S>
Polynomial<S> cumulant_q(const TraceModel<S>& model, unsigned k) {
  if (k == 0) throw Error("cumulant order starts at 1");
  const auto dy = UmbralMatrix<S>::diagonal(model.y);
  const auto sigma_t = matmul(matmul(dy, model.sigma), dy);
  Polynomial<S> x_trace;
  for (const auto& xj : model.x) x_trace += pow(xj, 2 * k);
  const Polynomial<S> s_trace = trace(matrix_power(sigma_t, k));
  Integer coeff = factorial(k - 1);
  coeff <<= (k - 1);
  return (x_trace * s_trace).scaled(Rational(coeff));
}

template <Scalar S>
Polynomial<S> cumulant_qtilde(const TraceModel<S>& model, unsigned k) {
  if (k == 0) throw Error("cumulant order starts at 1");
  const auto dy = UmbralMatrix<S>::diagonal(model.y);
  const auto dx = UmbralMatrix<S>::diagonal(model.x);
  const auto mean_t = matmul(matmul(dy, model.mean), dx);
  const auto v = vec(mean_t);
  const std::span<const Polynomial<S>> vs(v);
  if (k == 1) {
    Polynomial<S> total;
    for (const auto& e : v) total += e * e;
    return total;
  }
  const auto sigma_t = matmul(matmul(dy, model.sigma), dy);
  const auto kp = kron_power(matmul(dx, dx), sigma_t, k - 1);
  Integer coeff = factorial(k);
  coeff <<= (k - 1);
  return quadratic_form(vs, kp, vs).scaled(Rational(coeff));
}

template <Scalar S>
Polynomial<S> cumulant(const TraceModel<S>& model, unsigned k) {
  return cumulant_q(model, k) + cumulant_qtilde(model, k);
}

template <Scalar S>
Polynomial<S> trace_moment(const TraceModel<S>& model, unsigned i) {
  std::vector<Polynomial<S>> c;
  for (unsigned k = 1; k <= i; ++k) c.push_back(cumulant(model, k));
  return complete_bell<Polynomial<S>>(c);
}

template <Scalar S>
Polynomial<S> umbral_frame_moment(unsigned n, const UmbralMatrix<S>& sigma, const UmbralMatrix<S>& mean,
                                  unsigned i) {
  const auto p = static_cast<unsigned>(sigma.rows());
  if (mean.rows() != p || mean.cols() != n) throw Error("mean must be a p x n matrix");
  const auto model = TraceModel<S>::symbolic(sigma, mean, "y", "x");

  std::unordered_map<SymbolId, Polynomial<S>> deltas;
  const auto dp = make_delta_family(p, "delta");
  const auto dn = make_delta_family(n, "delta~");
  const auto ys = Indeterminate::family("y", p);
  const auto xs = Indeterminate::family("x", n);
  for (unsigned l = 0; l < p; ++l) deltas.emplace(ys[l].id(), Polynomial<S>(dp[l]));
  for (unsigned j = 0; j < n; ++j) deltas.emplace(xs[j].id(), Polynomial<S>(dn[j]));

  // Substitution is a ring homomorphism, so plugging the deltas into each
  // cumulant before forming B_i gives the same polynomial as plugging them
  // into B_i(c_1..c_i). Every c_k with k >= 2 carries delta powers 2k >= 4
  // and prunes to zero, leaving E[c_1^i].
  std::vector<Polynomial<S>> c;
  for (unsigned k = 1; k <= i; ++k) c.push_back(prune(substitute(cumulant(model, k), deltas)));
  const auto bell = complete_bell<Polynomial<S>>(
      c, [](const Polynomial<S>& a, const Polynomial<S>& b) { return mul_pruned(a, b); });
  return eval(bell);
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::trivial: return "trivial";
    case Regime::central: return "central";
    case Regime::scaled_identity: return "scaled_identity";
    case Regime::full_rank: return "full_rank";
    case Regime::submatrix: return "submatrix";
  }
  return "unknown";
}

EsfValue esf_expectation_umbral(const WishartParams<Rational>& params, unsigned i) {
  return umbral_route(params, i);
}

EsfValue esf_expectation_umbral(const WishartParams<double>& params, unsigned i) {
  return umbral_route(params, i);
}

template <Scalar S>
S closed_form_central(const WishartParams<S>& params, unsigned i) {
  return S(integer_scalar<S>(falling_factorial(params.n, i)) * principal_minor_sum(params.sigma, i));
}

template <Scalar S>
S closed_form_scaled_identity(const WishartParams<S>& params, unsigned i) {
  const auto sigma2 = scaled_identity_factor(params.sigma);
  if (!sigma2) throw Error("sigma is not a scaled identity");
  const unsigned p = params.p();
  if (i > p) return scalar_from_int<S>(0);
  const Matrix<S> gram = mean_gram(params);
  S total = scalar_from_int<S>(0);
  for (unsigned j = 0; j <= i; ++j) {
    S term = integer_scalar<S>(falling_factorial(long(params.n) - j, i - j) * binomial(long(p) - j, long(i) - j));
    for (unsigned e = 0; e < i - j; ++e) term = S(term * *sigma2);
    total += S(term * principal_minor_sum(gram, j));
  }
  return total;
}

template <Scalar S>
S closed_form_full_rank(const WishartParams<S>& params) {
  const unsigned p = params.p();
  const Matrix<S> omega = matmul(inverse(params.sigma), mean_gram(params));
  S total = scalar_from_int<S>(0);
  for (unsigned j = 0; j <= p; ++j)
    total += S(integer_scalar<S>(falling_factorial(long(params.n) - j, p - j)) * principal_minor_sum(omega, j));
  return S(determinant(params.sigma) * total);
}

template <Scalar S>
S closed_form_general(const WishartParams<S>& params, unsigned i) {
  const unsigned p = params.p();
  if (i > p) return scalar_from_int<S>(0);
  const Matrix<S> gram = mean_gram(params);
  S total = closed_form_central(params, i);
  for (const auto& idx : index_subsets(p, i)) {
    const std::span<const std::size_t> rows(idx);
    const Matrix<S> sigma_j = principal_submatrix(params.sigma, rows);
    const S det_j = determinant(sigma_j);
    if (ScalarTraits<S>::is_zero(det_j)) throw Error("singular principal submatrix of sigma");
    const Matrix<S> omega_j = matmul(inverse(sigma_j), principal_submatrix(gram, rows));
    for (unsigned k = 1; k <= i; ++k) {
      const S weight = integer_scalar<S>(falling_factorial(long(params.n) - k, i - k));
      total += S(weight * det_j * principal_minor_sum(omega_j, k));
    }
  }
  return total;
}

template <Scalar S>
S esf_expectation_closed_form(const WishartParams<S>& params, unsigned i) {
  params.validate();
  const unsigned p = params.p();
  if (i == 0) return scalar_from_int<S>(1);
  if (i > p) return scalar_from_int<S>(0);
  if (is_zero_matrix(params.mean)) return closed_form_central(params, i);
  if (scaled_identity_factor(params.sigma)) return closed_form_scaled_identity(params, i);
  if (i == p) return closed_form_full_rank(params);
  return closed_form_general(params, i);
}

template <Scalar S>
S noncentral_chisq_cumulant(const Matrix<S>& sigma, std::span<const S> m, unsigned k) {
  if (k == 0) throw Error("cumulant order starts at 1");
  if (!sigma.is_square() || m.size() != sigma.rows()) throw Error("sigma and m shapes disagree");
  const Matrix<S> lower = matrix_power(sigma, k - 1);
  const S tr = trace(matmul(lower, sigma));
  const S mean_part = quadratic_form(m, lower, m);
  Integer coeff = factorial(k - 1);
  coeff <<= (k - 1);
  return S(integer_scalar<S>(coeff) * (tr + integer_scalar<S>(Integer(k)) * mean_part));
}

Polynomial<Rational> quadratic_form_umbra(const Matrix<Rational>& sigma, std::span<const Rational> m) {
  if (m.size() != sigma.rows()) throw Error("sigma and m shapes disagree");
  const auto factor = ldlt(sigma);
  const std::size_t p = sigma.rows();
  const auto units = make_unity_family(static_cast<unsigned>(p), "u");
  std::vector<Umbra> zetas;
  for (std::size_t b = 0; b < p; ++b)
    zetas.push_back(Umbra::gaussian(0, factor.pivots[b], "zeta_" + std::to_string(b + 1)));
  Polynomial<Rational> total;
  for (std::size_t a = 0; a < p; ++a) {
    Polynomial<Rational> eta = Polynomial<Rational>(units[a]) * Polynomial<Rational>(m[a]);
    for (std::size_t b = 0; b <= a; ++b)
      eta += Polynomial<Rational>(zetas[b]) * Polynomial<Rational>(factor.lower(a, b));
    total += eta * eta;
  }
  return total;
}

DeWaalCheck desf_conjecture_identity(unsigned p, unsigned n, unsigned i, unsigned j,
                                     std::span<const Rational> m) {
  if (j > i || i > std::min(p, n)) throw Error("de Waal identity needs j <= i <= min(p, n)");
  if (m.size() != p) throw Error("m must have length p");
  const auto chi = make_singleton_family(p, "chi");
  const auto chi_t = make_singleton_family(n, "chi~");
  const unsigned shared = std::min(p, n);

  Polynomial<Rational> sum;
  for (const auto& outer : index_subsets(shared, j)) {
    Polynomial<Rational> outer_term(Rational(1));
    std::vector<bool> used(std::max(p, n), false);
    for (auto k : outer) {
      outer_term *= Polynomial<Rational>(chi[k]) * Polynomial<Rational>(chi_t[k]) *
                    Polynomial<Rational>(Rational(m[k] * m[k]));
      used[k] = true;
    }
    std::vector<std::size_t> free_p;
    std::vector<std::size_t> free_n;
    for (std::size_t t = 0; t < p; ++t)
      if (!used[t]) free_p.push_back(t);
    for (std::size_t s = 0; s < n; ++s)
      if (!used[s]) free_n.push_back(s);
    Polynomial<Rational> inner;
    for (const auto& ts : index_subsets(free_p.size(), i - j))
      for (const auto& ss : index_subsets(free_n.size(), i - j)) {
        Polynomial<Rational> mono(Rational(1));
        for (auto t : ts) mono *= Polynomial<Rational>(chi[free_p[t]]);
        for (auto s : ss) mono *= Polynomial<Rational>(chi_t[free_n[s]]);
        inner += mono;
      }
    sum += outer_term * inner;
  }

  DeWaalCheck out;
  out.kernel = *eval(sum).as_constant();

  std::vector<Rational> squares;
  for (unsigned k = 0; k < shared; ++k) squares.push_back(m[k] * m[k]);
  out.reference = Rational(binomial(n - j, i - j) * binomial(p - j, i - j)) *
                  esf_direct<Rational>(squares, j);

  // Binomial cross term built from whole sums, with pruned products.
  Polynomial<Rational> sum_chi;
  Polynomial<Rational> sum_chi_t;
  Polynomial<Rational> mixed;
  for (unsigned k = 0; k < p; ++k) sum_chi += Polynomial<Rational>(chi[k]);
  for (unsigned k = 0; k < n; ++k) sum_chi_t += Polynomial<Rational>(chi_t[k]);
  for (unsigned k = 0; k < shared; ++k)
    mixed += Polynomial<Rational>(chi[k]) * Polynomial<Rational>(chi_t[k]) *
             Polynomial<Rational>(Rational(m[k] * m[k]));
  const auto product = mul_pruned(sum_chi, sum_chi_t);
  Polynomial<Rational> cross(Rational(1));
  for (unsigned e = 0; e < i - j; ++e) cross = mul_pruned(cross, product);
  for (unsigned e = 0; e < j; ++e) cross = mul_pruned(cross, mixed);
  out.cross_term = *eval(cross).as_constant() / Rational(factorial(i - j) * factorial(j));
  return out;
}

#define POLYTRACE_INSTANTIATE(S)                                                              \
  template struct WishartParams<S>;                                                          \
  template struct TraceModel<S>;                                                             \
  template Polynomial<S> cumulant_q(const TraceModel<S>&, unsigned);                         \
  template Polynomial<S> cumulant_qtilde(const TraceModel<S>&, unsigned);                    \
  template Polynomial<S> cumulant(const TraceModel<S>&, unsigned);                           \
  template Polynomial<S> trace_moment(const TraceModel<S>&, unsigned);                       \
  template Polynomial<S> umbral_frame_moment(unsigned, const UmbralMatrix<S>&,               \
                                             const UmbralMatrix<S>&, unsigned);              \
  template S esf_expectation_closed_form(const WishartParams<S>&, unsigned);                 \
  template S closed_form_general(const WishartParams<S>&, unsigned);                         \
  template S closed_form_central(const WishartParams<S>&, unsigned);                         \
  template S closed_form_scaled_identity(const WishartParams<S>&, unsigned);                 \
  template S closed_form_full_rank(const WishartParams<S>&);                                 \
  template S noncentral_chisq_cumulant(const Matrix<S>&, std::span<const S>, unsigned);

POLYTRACE_INSTANTIATE(Rational)
POLYTRACE_INSTANTIATE(double)

#undef POLYTRACE_INSTANTIATE

}  // namespace polytrace
