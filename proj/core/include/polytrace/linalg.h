#pragma once

#include <cstddef>
#include <vector>

#include "polytrace/matrix.h"
#include "polytrace/scalar.h"

namespace polytrace {

// Scalar-field linear algebra. Rational routines are exact (fraction
// arithmetic, no pivoting tolerance); double routines pivot on magnitude.

template <Scalar S>
S determinant(const Matrix<S>& a);

/// Throws Error("singular matrix").
template <Scalar S>
Matrix<S> inverse(const Matrix<S>& a);

/// Tr_k(A): sum of the k x k principal minors, i.e. e_k of the
/// eigenvalues. Tr_0 = 1; Tr_k = 0 for k > dim.
template <Scalar S>
S principal_minor_sum(const Matrix<S>& a, unsigned k);

/// Exact equality for Rational; |a_ij - a_ji| <= tol for double.
template <Scalar S>
bool is_symmetric(const Matrix<S>& a, double tol = 1e-12);

/// All leading principal minors strictly positive.
template <Scalar S>
bool is_positive_definite(const Matrix<S>& a);

/// Off-diagonal entries zero (rectangular shapes allowed).
template <Scalar S>
bool is_diagonal(const Matrix<S>& a);

template <Scalar S>
bool is_zero_matrix(const Matrix<S>& a);

/// LDL^T of a symmetric positive-definite matrix: unit lower-triangular L
/// and the pivots d. Exact over the rationals.
template <Scalar S>
struct Ldlt {
  Matrix<S> lower;
  std::vector<S> pivots;
};

template <Scalar S>
Ldlt<S> ldlt(const Matrix<S>& a);

Matrix<double> to_double(const Matrix<Rational>& a);
inline const Matrix<double>& to_double(const Matrix<double>& a) { return a; }

/// m = left * rect_diag(values) * right^T with left (rows x rows) and right
/// (cols x cols) orthogonal; values sorted decreasingly.
struct SingularValueDecomposition {
  Matrix<double> left;
  std::vector<double> values;
  Matrix<double> right;
};

SingularValueDecomposition svd(const Matrix<double>& m);

/// Symmetric A^{-1/2} of a symmetric positive-definite matrix.
/// Throws Error("inverse square root undefined") otherwise.
Matrix<double> inverse_sqrt_spd(const Matrix<double>& a);

/// Lower Cholesky factor; throws Error("cholesky failed: ...") when the
/// matrix is not positive definite.
Matrix<double> cholesky(const Matrix<double>& a);

/// max_ij |(Q^T Q - I)_ij|.
double orthogonality_error(const Matrix<double>& q);

inline constexpr double kOrthogonalityTolerance = 1e-10;

}  // namespace polytrace
