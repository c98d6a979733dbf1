#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "polytrace/wishart.h"

namespace polytrace {

/// Point estimate with its standard error (0 for exact values).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// E[G_{k_1} ... G_{k_m}] for a centred Gaussian vector G with covariance
/// `cov`: sum over pair partitions of products of covariances. Indices may
/// repeat. 0 for odd m, 1 for m = 0.
Rational isserlis(const Matrix<Rational>& cov, std::span<const std::size_t> indices);

/// Largest p * n * i the Wick expansion accepts.
inline constexpr unsigned kWickLimit = 12;

/// Exact E[Tr_i(X X^T)]: Tr_i expanded as a polynomial in the p n entries
/// of X, X = M + G with Cov(G_aj, G_bk) = Sigma_ab [j = k], each monomial
/// expanded binomially and the centred parts taken by Isserlis.
/// Throws Error("wick oracle limit") when p * n * i > 12.
Rational wick_expectation(const WishartParams<Rational>& params, unsigned i);

/// Exact E{[Tr (D_y X D_x)(D_y X D_x)^T]^i} by the same expansion.
Rational wick_trace_moment(const WishartParams<Rational>& params, unsigned i, std::span<const Rational> y,
                           std::span<const Rational> x);

/// Standard normals from a 64-bit seed: mt19937_64 feeding Box-Muller.
/// Each engine draw x maps to u = ((x >> 11) + 1/2) 2^-53 in (0, 1); a
/// pair (u1, u2) yields r cos(t) then r sin(t), r = sqrt(-2 log u1),
/// t = 2 pi u2. The seed-to-stream mapping is stable.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Monte Carlo E[Tr_i(W)]: columns X_j = m_j + L z_j with L L^T = Sigma,
/// z_j filled column by column from NormalStream(seed), W = X X^T and
/// Tr_i(W) summed over i x i principal minors. Sample mean and standard
/// error; i = 0 gives (1, 0) and i > p gives (0, 0) without sampling.
/// Requires samples >= 2.
Estimate mc_estimate(const WishartParams<double>& params, unsigned i, std::uint64_t samples, std::uint64_t seed);

/// Estimates for i = 0..max_i from one stream. Entry i equals
/// mc_estimate(params, i, samples, seed) bit for bit.
std::vector<Estimate> mc_estimate_all(const WishartParams<double>& params, unsigned max_i, std::uint64_t samples,
                                      std::uint64_t seed);

/// Monte Carlo i-th moment of Tr[(D_y X D_x)(D_y X D_x)^T] at numeric y, x.
Estimate mc_trace_moment(const WishartParams<double>& params, unsigned i, std::span<const double> y,
                         std::span<const double> x, std::uint64_t samples, std::uint64_t seed);

/// Cumulants k_1..k_order of Q = eta^T eta, eta ~ N_p(m, Sigma). The
/// samples are split into `batches` equal consecutive batches; each batch
/// gives unbiased k-statistics, and the estimate is their mean with the
/// batch-to-batch standard error. Requires order <= 4 and at least four
/// samples per batch.
std::vector<Estimate> mc_quadratic_form_cumulants(const Matrix<double>& sigma, std::span<const double> m,
                                                  unsigned order, std::uint64_t samples, std::uint64_t seed,
                                                  unsigned batches = 100);

}  // namespace polytrace
