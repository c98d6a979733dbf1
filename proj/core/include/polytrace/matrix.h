#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polytrace/combinatorics.h"
#include "polytrace/error.h"

namespace polytrace {

/// Dense row-major matrix over a commutative ring T (Rational, double or a
/// Polynomial). Desk-scale sizes; entries may be expensive, shapes are not.
template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, ring::from_integer<T>(Integer(0))) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> row_major)
      : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows * cols) throw Error("matrix data does not match its shape");
  }

  static Matrix identity(std::size_t n) {
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) out(k, k) = ring::from_integer<T>(Integer(1));
    return out;
  }

  static Matrix diagonal(std::span<const T> entries) {
    return rect_diag(entries, entries.size(), entries.size());
  }

  /// rows x cols matrix holding `entries` at positions (k, k).
  static Matrix rect_diag(std::span<const T> entries, std::size_t rows, std::size_t cols) {
    if (entries.size() > std::min(rows, cols)) throw Error("too many diagonal entries for shape");
    Matrix out(rows, cols);
    for (std::size_t k = 0; k < entries.size(); ++k) out(k, k) = entries[k];
    return out;
  }

  static Matrix filled(std::size_t rows, std::size_t cols, const T& value) {
    return Matrix(rows, cols, std::vector<T>(rows * cols, value));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  const std::vector<T>& data() const { return data_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  /// Applies f entrywise, e.g. to lift a scalar matrix to polynomials.
  template <class F>
  auto map(F f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
    using U = decltype(f(std::declval<const T&>()));
    std::vector<U> out;
    out.reserve(data_.size());
    for (const auto& v : data_) out.push_back(f(v));
    return Matrix<U>(rows_, cols_, std::move(out));
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}
template <class T>
bool is_zero_entry(const T& v) {
  if constexpr (requires { v.is_zero(); })
    return v.is_zero();
  else
    return v == ring::from_integer<T>(Integer(0));
}
}  // namespace detail

template <class T>
Matrix<T> transpose(const Matrix<T>& a) {
  Matrix<T> out(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  return out;
}

template <class T>
Matrix<T> operator+(const Matrix<T>& a, const Matrix<T>& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "dimension mismatch in add");
  Matrix<T> out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) + b(r, c);
  return out;
}

template <class T>
Matrix<T> operator-(const Matrix<T>& a, const Matrix<T>& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "dimension mismatch in subtract");
  Matrix<T> out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) - b(r, c);
  return out;
}

template <class T>
Matrix<T> scale(const T& factor, const Matrix<T>& a) {
  return a.map([&](const T& v) { return T(factor * v); });
}

/// Zero entries are skipped, which matters for sparse polynomial matrices.
template <class T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  detail::require(a.cols() == b.rows(), "dimension mismatch in matmul");
  Matrix<T> out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (detail::is_zero_entry(a(r, k))) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) {
        if (detail::is_zero_entry(b(k, c))) continue;
        out(r, c) = out(r, c) + a(r, k) * b(k, c);
      }
    }
  return out;
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  return matmul(a, b);
}

template <class T>
Matrix<T> matrix_power(const Matrix<T>& a, unsigned k) {
  detail::require(a.is_square(), "matrix power needs a square matrix");
  Matrix<T> out = Matrix<T>::identity(a.rows());
  for (unsigned e = 0; e < k; ++e) out = matmul(out, a);
  return out;
}

template <class T>
T trace(const Matrix<T>& a) {
  detail::require(a.is_square(), "trace needs a square matrix");
  T total = ring::from_integer<T>(Integer(0));
  for (std::size_t k = 0; k < a.rows(); ++k) total = total + a(k, k);
  return total;
}

/// Block matrix [a_ij * b].
template <class T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      if (detail::is_zero_entry(a(ar, ac))) continue;
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = a(ar, ac) * b(br, bc);
    }
  return out;
}

/// (a kron b)^k computed as a^k kron b^k.
template <class T>
Matrix<T> kron_power(const Matrix<T>& a, const Matrix<T>& b, unsigned k) {
  return kron(matrix_power(a, k), matrix_power(b, k));
}

/// Column stacking: columns placed underneath each other, first column first.
template <class T>
std::vector<T> vec(const Matrix<T>& a) {
  std::vector<T> out;
  out.reserve(a.rows() * a.cols());
  for (std::size_t c = 0; c < a.cols(); ++c)
    for (std::size_t r = 0; r < a.rows(); ++r) out.push_back(a(r, c));
  return out;
}

template <class T>
Matrix<T> vec_inverse(std::span<const T> v, std::size_t rows, std::size_t cols) {
  detail::require(v.size() == rows * cols, "length mismatch in vec_inverse");
  Matrix<T> out(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) out(r, c) = v[c * rows + r];
  return out;
}

/// Column vector as an n x 1 matrix.
template <class T>
Matrix<T> column(std::span<const T> v) {
  return Matrix<T>(v.size(), 1, std::vector<T>(v.begin(), v.end()));
}

/// u^T A v for vectors given as spans.
template <class T>
T quadratic_form(std::span<const T> u, const Matrix<T>& a, std::span<const T> v) {
  detail::require(u.size() == a.rows() && v.size() == a.cols(), "dimension mismatch in quadratic form");
  T total = ring::from_integer<T>(Integer(0));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (detail::is_zero_entry(u[r])) continue;
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (detail::is_zero_entry(a(r, c)) || detail::is_zero_entry(v[c])) continue;
      total = total + u[r] * a(r, c) * v[c];
    }
  }
  return total;
}

template <class T>
Matrix<T> hadamard(const Matrix<T>& a, const Matrix<T>& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "shape mismatch in hadamard");
  Matrix<T> out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) * b(r, c);
  return out;
}

/// Rows and columns `index` (increasing) of a square matrix.
template <class T>
Matrix<T> principal_submatrix(const Matrix<T>& a, std::span<const std::size_t> index) {
  detail::require(a.is_square(), "principal submatrix needs a square matrix");
  Matrix<T> out(index.size(), index.size());
  for (std::size_t r = 0; r < index.size(); ++r)
    for (std::size_t c = 0; c < index.size(); ++c) out(r, c) = a(index[r], index[c]);
  return out;
}

/// Selected rows, all columns.
template <class T>
Matrix<T> row_submatrix(const Matrix<T>& a, std::span<const std::size_t> index) {
  Matrix<T> out(index.size(), a.cols());
  for (std::size_t r = 0; r < index.size(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(index[r], c);
  return out;
}

inline constexpr std::size_t kLeibnizLimit = 6;

/// Leibniz-sum determinant; valid over any commutative ring. Throws
/// Error("determinant size limit") above `limit`.
template <class T>
T det_leibniz(const Matrix<T>& a, std::size_t limit = kLeibnizLimit) {
  detail::require(a.is_square(), "determinant needs a square matrix");
  if (a.rows() > limit) throw Error("determinant size limit");
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  T total = ring::from_integer<T>(Integer(0));
  do {
    // Sign from the inversion count.
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    T term = ring::from_integer<T>(Integer(inversions % 2 == 0 ? 1 : -1));
    bool zero = false;
    for (std::size_t r = 0; r < n && !zero; ++r) {
      if (detail::is_zero_entry(a(r, perm[r]))) zero = true;
      else term = term * a(r, perm[r]);
    }
    if (!zero) total = total + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

/// All increasing k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> index_subsets(std::size_t n, std::size_t k);

}  // namespace polytrace
