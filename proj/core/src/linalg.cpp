#include "polytrace/linalg.h"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace polytrace {

namespace {

template <Scalar S>
bool pivot_is_zero(const S& v) {
  return ScalarTraits<S>::is_zero(v);
}

double magnitude(double v) { return std::fabs(v); }
double magnitude(const Rational& v) { return std::fabs(v.get_d()); }

// Picks the row with a nonzero pivot (largest magnitude, which for
// rationals only affects fraction sizes, not exactness).
template <Scalar S>
std::size_t choose_pivot(const Matrix<S>& m, std::size_t col) {
  std::size_t best = col;
  for (std::size_t r = col + 1; r < m.rows(); ++r)
    if (magnitude(m(r, col)) > magnitude(m(best, col))) best = r;
  return best;
}

template <Scalar S>
void swap_rows(Matrix<S>& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(a, c), m(b, c));
}

Eigen::MatrixXd to_eigen(const Matrix<double>& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(Eigen::Index(r), Eigen::Index(c)) = a(r, c);
  return out;
}

Matrix<double> from_eigen(const Eigen::MatrixXd& a) {
  Matrix<double> out(std::size_t(a.rows()), std::size_t(a.cols()));
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out(std::size_t(r), std::size_t(c)) = a(r, c);
  return out;
}

}  // namespace

template <Scalar S>
S determinant(const Matrix<S>& a) {
  detail::require(a.is_square(), "determinant needs a square matrix");
  Matrix<S> m = a;
  S det = scalar_from_int<S>(1);
  const std::size_t n = m.rows();
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t piv = choose_pivot(m, col);
    if (pivot_is_zero(m(piv, col))) return scalar_from_int<S>(0);
    if (piv != col) {
      swap_rows(m, piv, col);
      det = -det;
    }
    det = S(det * m(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (pivot_is_zero(m(r, col))) continue;
      const S factor = S(m(r, col) / m(col, col));
      for (std::size_t c = col; c < n; ++c) m(r, c) = S(m(r, c) - factor * m(col, c));
    }
  }
  return det;
}

template <Scalar S>
Matrix<S> inverse(const Matrix<S>& a) {
  detail::require(a.is_square(), "inverse needs a square matrix");
  const std::size_t n = a.rows();
  Matrix<S> m = a;
  Matrix<S> inv = Matrix<S>::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t piv = choose_pivot(m, col);
    if (pivot_is_zero(m(piv, col))) throw Error("singular matrix");
    swap_rows(m, piv, col);
    swap_rows(inv, piv, col);
    const S p = m(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      m(col, c) = S(m(col, c) / p);
      inv(col, c) = S(inv(col, c) / p);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || pivot_is_zero(m(r, col))) continue;
      const S factor = m(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        m(r, c) = S(m(r, c) - factor * m(col, c));
        inv(r, c) = S(inv(r, c) - factor * inv(col, c));
      }
    }
  }
  return inv;
}

template <Scalar S>
S principal_minor_sum(const Matrix<S>& a, unsigned k) {
  detail::require(a.is_square(), "principal minors need a square matrix");
  if (k == 0) return scalar_from_int<S>(1);
  S total = scalar_from_int<S>(0);
  for (const auto& idx : index_subsets(a.rows(), k)) total += determinant(principal_submatrix(a, std::span<const std::size_t>(idx)));
  return total;
}

template <Scalar S>
bool is_symmetric(const Matrix<S>& a, double tol) {
  if (!a.is_square()) return false;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = r + 1; c < a.cols(); ++c) {
      if constexpr (ScalarTraits<S>::exact) {
        if (a(r, c) != a(c, r)) return false;
      } else {
        if (std::fabs(a(r, c) - a(c, r)) > tol) return false;
      }
    }
  return true;
}

template <Scalar S>
bool is_positive_definite(const Matrix<S>& a) {
  if (!a.is_square()) return false;
  for (std::size_t k = 1; k <= a.rows(); ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t t = 0; t < k; ++t) idx[t] = t;
    if (!(determinant(principal_submatrix(a, std::span<const std::size_t>(idx))) > 0)) return false;
  }
  return true;
}

template <Scalar S>
bool is_diagonal(const Matrix<S>& a) {
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c && !ScalarTraits<S>::is_zero(a(r, c))) return false;
  return true;
}

template <Scalar S>
bool is_zero_matrix(const Matrix<S>& a) {
  for (const auto& v : a.data())
    if (!ScalarTraits<S>::is_zero(v)) return false;
  return true;
}

template <Scalar S>
Ldlt<S> ldlt(const Matrix<S>& a) {
  detail::require(a.is_square(), "ldlt needs a square matrix");
  const std::size_t n = a.rows();
  Ldlt<S> out{Matrix<S>::identity(n), std::vector<S>(n, scalar_from_int<S>(0))};
  for (std::size_t j = 0; j < n; ++j) {
    S d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= out.lower(j, k) * out.lower(j, k) * out.pivots[k];
    if (!(d > 0)) throw Error("ldlt needs a positive-definite matrix");
    out.pivots[j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      S v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= out.lower(i, k) * out.lower(j, k) * out.pivots[k];
      out.lower(i, j) = S(v / d);
    }
  }
  return out;
}

Matrix<double> to_double(const Matrix<Rational>& a) {
  return a.map([](const Rational& v) { return v.get_d(); });
}

SingularValueDecomposition svd(const Matrix<double>& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(to_eigen(m), Eigen::ComputeFullU | Eigen::ComputeFullV);
  SingularValueDecomposition out;
  out.left = from_eigen(solver.matrixU());
  out.right = from_eigen(solver.matrixV());
  const auto& sv = solver.singularValues();
  out.values.assign(sv.data(), sv.data() + sv.size());
  return out;
}

Matrix<double> inverse_sqrt_spd(const Matrix<double>& a) {
  if (!is_symmetric(a) || !is_positive_definite(a)) throw Error("inverse square root undefined");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(a));
  if (solver.info() != Eigen::Success || solver.eigenvalues().minCoeff() <= 0.0)
    throw Error("inverse square root undefined");
  return from_eigen(solver.operatorInverseSqrt());
}

Matrix<double> cholesky(const Matrix<double>& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(to_eigen(a));
  if (llt.info() != Eigen::Success) throw Error("cholesky failed: covariance is not positive definite");
  return from_eigen(llt.matrixL().toDenseMatrix());
}

double orthogonality_error(const Matrix<double>& q) {
  const Matrix<double> g = matmul(transpose(q), q);
  double worst = 0.0;
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c)
      worst = std::max(worst, std::fabs(g(r, c) - (r == c ? 1.0 : 0.0)));
  return worst;
}

std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t t = 0; t < k; ++t) idx[t] = t;
  while (true) {
    out.push_back(idx);
    // Advance to the next combination in lexicographic order.
    std::size_t t = k;
    while (t > 0 && idx[t - 1] == n - k + t - 1) --t;
    if (t == 0) break;
    ++idx[t - 1];
    for (std::size_t s = t; s < k; ++s) idx[s] = idx[s - 1] + 1;
  }
  return out;
}

#define POLYTRACE_INSTANTIATE(S)                                    \
  template S determinant(const Matrix<S>&);                         \
  template Matrix<S> inverse(const Matrix<S>&);                     \
  template S principal_minor_sum(const Matrix<S>&, unsigned);      \
  template bool is_symmetric(const Matrix<S>&, double);             \
  template bool is_positive_definite(const Matrix<S>&);             \
  template bool is_diagonal(const Matrix<S>&);                      \
  template bool is_zero_matrix(const Matrix<S>&);                   \
  template Ldlt<S> ldlt(const Matrix<S>&);

POLYTRACE_INSTANTIATE(Rational)
POLYTRACE_INSTANTIATE(double)

#undef POLYTRACE_INSTANTIATE

}  // namespace polytrace
