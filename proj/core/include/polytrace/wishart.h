#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polytrace/linalg.h"
#include "polytrace/umbral_matrix.h"

namespace polytrace {

/// Non-central Wishart W_p(n, Sigma, M) = X X^T with X a p x n matrix
/// normal: independent columns X_j ~ N(M_j, Sigma).
template <Scalar S>
struct WishartParams {
  unsigned n = 0;
  Matrix<S> sigma;  // p x p, symmetric positive definite
  Matrix<S> mean;   // p x n

  unsigned p() const { return static_cast<unsigned>(sigma.rows()); }

  /// Validated construction; a missing mean is the zero matrix.
  static WishartParams make(unsigned n, Matrix<S> sigma, std::optional<Matrix<S>> mean = std::nullopt);
  /// Throws Error unless p >= 1, n >= p, shapes agree and Sigma is
  /// symmetric (exactly, or within 1e-12) and positive definite.
  void validate() const;
};

/// Inputs of the polynomial trace Tr[(D_y X D_x)(D_y X D_x)^T]: Sigma and
/// M may hold symbolic entries, and y, x are whatever polynomials the
/// caller plugs in (indeterminates, umbrae, numbers).
template <Scalar S>
struct TraceModel {
  UmbralMatrix<S> sigma;
  UmbralMatrix<S> mean;
  std::vector<Polynomial<S>> y;
  std::vector<Polynomial<S>> x;

  /// y = (y_1..y_p), x = (x_1..x_n) as indeterminates.
  static TraceModel symbolic(const UmbralMatrix<S>& sigma, const UmbralMatrix<S>& mean,
                             const std::string& y_name = "y", const std::string& x_name = "x");
  static TraceModel symbolic(const WishartParams<S>& params);

  unsigned p() const { return static_cast<unsigned>(sigma.rows()); }
  unsigned n() const { return static_cast<unsigned>(mean.cols()); }
};

/// Central cumulant q_k = (k-1)! 2^{k-1} Tr[(D_x^2 kron Sigma~)^k] with
/// Sigma~ = D_y Sigma D_y, evaluated as (k-1)! 2^{k-1} Tr(D_x^{2k})
/// Tr(Sigma~^k). For diagonal Sigma = D_theta this is
/// (k-1)! 2^{k-1} sum_j sum_l x_j^{2k} y_l^{2k} theta_l^k.
template <Scalar S>
Polynomial<S> cumulant_q(const TraceModel<S>& model, unsigned k);

/// Mean contribution: vec^T(M~) vec(M~) for k = 1 and
/// k! 2^{k-1} vec^T(M~) (D_x^2 kron Sigma~)^{k-1} vec(M~) for k > 1,
/// with M~ = D_y M D_x.
template <Scalar S>
Polynomial<S> cumulant_qtilde(const TraceModel<S>& model, unsigned k);

/// c_k = q_k + q~_k.
template <Scalar S>
Polynomial<S> cumulant(const TraceModel<S>& model, unsigned k);

/// E{[Tr (D_y X D_x)(D_y X D_x)^T]^i} = B_i(c_1, ..., c_i).
template <Scalar S>
Polynomial<S> trace_moment(const TraceModel<S>& model, unsigned i);

enum class Regime {
  trivial,          // i = 0 or i > p
  central,          // M = 0, any Sigma
  scaled_identity,  // Sigma = sigma^2 I, any M
  full_rank,        // i = p, any (Sigma, M)
  submatrix,        // general: sum over i x i principal blocks
};

const char* to_string(Regime regime);

/// E[Tr_i(W)] from an umbral route. `exact` is set when the whole route
/// ran in rational arithmetic (central regime, and scaled identity with a
/// rectangular-diagonal mean); otherwise the SVD / square-root factors
/// forced floating point.
struct EsfValue {
  Regime regime = Regime::trivial;
  std::optional<Rational> exact;
  double value = 0.0;
};

/// E[Tr_i(W)] by plugging delta umbrae into the polynomial trace moments
/// and evaluating: i! E[Tr_i(W)] = E{[Tr(Delta_p X Delta~_n)(...)^T]^i}.
/// Regimes are tried in the order central, scaled identity, full rank,
/// submatrix sum. Returns 1 for i = 0 and 0 for i > p.
EsfValue esf_expectation_umbral(const WishartParams<Rational>& params, unsigned i);
EsfValue esf_expectation_umbral(const WishartParams<double>& params, unsigned i);

/// i! E[Tr_i(W)] in a frame where Sigma and M are already diagonal
/// (possibly symbolic): substitute deltas for y and x into c_1..c_i, form
/// B_i with pruned products and evaluate. Exposed for tests and benches.
template <Scalar S>
Polynomial<S> umbral_frame_moment(unsigned n, const UmbralMatrix<S>& sigma,
                                  const UmbralMatrix<S>& mean, unsigned i);

/// E[Tr_i(W)] from the closed forms: the three special cases when their
/// guards hold (M = 0; Sigma = sigma^2 I; i = p), the general principal
/// submatrix formula otherwise. 1 for i = 0, 0 for i > p.
template <Scalar S>
S esf_expectation_closed_form(const WishartParams<S>& params, unsigned i);

/// General formula
/// (n)_i Tr_i(Sigma) + sum_{k=1}^i (n-k)_{i-k} sum_{|J|=i} det(Sigma_J)
///   Tr_k(Sigma_J^{-1} (M M^T)_J),
/// J ranging over increasing i-subsets of rows; the e.s.f. order of the
/// inner Tr is bound to the outer summation index k.
template <Scalar S>
S closed_form_general(const WishartParams<S>& params, unsigned i);

/// (n)_i Tr_i(Sigma), valid for M = 0.
template <Scalar S>
S closed_form_central(const WishartParams<S>& params, unsigned i);

/// sigma^{2i} sum_j (n-j)_{i-j} C(p-j, i-j) Tr_j(Omega), Omega = M M^T / sigma^2,
/// valid for Sigma = sigma^2 I. Throws Error if Sigma is not a scaled identity.
template <Scalar S>
S closed_form_scaled_identity(const WishartParams<S>& params, unsigned i);

/// det(Sigma) sum_j (n-j)_{p-j} Tr_j(Omega), Omega = Sigma^{-1} M M^T; i = p.
template <Scalar S>
S closed_form_full_rank(const WishartParams<S>& params);

/// k-th cumulant of X^T X for X ~ N_p(m, Sigma):
/// (k-1)! 2^{k-1} [Tr(Sigma^k) + k m^T Sigma^{k-1} m].
template <Scalar S>
S noncentral_chisq_cumulant(const Matrix<S>& sigma, std::span<const S> m, unsigned k);

/// Umbral polynomial eta^T eta for a normal umbral p-tuple
/// eta = m o u + zeta F with F^T F = Sigma. F comes from Sigma = L D L^T
/// and each sqrt(d_b) zeta_b is a gaussian(0, d_b) umbra, so everything
/// stays rational.
Polynomial<Rational> quadratic_form_umbra(const Matrix<Rational>& sigma, std::span<const Rational> m);

/// Both sides of the double-singleton identity behind the scaled-identity
/// case: `kernel` evaluates
///   sum_{|K|=j} prod_{k in K} chi_k chi~_k m_k^2
///     * sum_{T, S} prod_{t in T} chi_t prod_{s in S} chi~_s
/// (T a (i-j)-subset of [p]\K, S of [n]\K) through E; `reference` is
/// C(n-j, i-j) C(p-j, i-j) e_j(m_1^2, ...). K ranges over [min(p, n)],
/// so only the first min(p, n) entries of m take part.
/// `cross_term` evaluates the binomial cross term
///   (p.chi)^{i-j} (n.chi~)^{i-j} (sum_k chi_k chi~_k m_k^2)^j / ((i-j)! j!),
/// which equals (i-j)! * reference.
struct DeWaalCheck {
  Rational kernel;
  Rational reference;
  Rational cross_term;
};

DeWaalCheck desf_conjecture_identity(unsigned p, unsigned n, unsigned i, unsigned j,
                                     std::span<const Rational> m);

}  // namespace polytrace
