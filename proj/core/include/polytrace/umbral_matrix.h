#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "polytrace/matrix.h"
#include "polytrace/polynomial.h"

namespace polytrace {

/// Matrix whose entries are umbral polynomials (D_x, D_y, Delta_p, the
/// singleton matrix, M-tilde, Sigma-tilde, ...).
template <Scalar S>
using UmbralMatrix = Matrix<Polynomial<S>>;

/// Entrywise lift of a scalar matrix.
template <Scalar S>
UmbralMatrix<S> lift(const Matrix<S>& a) {
  return a.map([](const S& v) { return Polynomial<S>(v); });
}

/// diag(name_1, ..., name_count) over indeterminates.
template <Scalar S>
UmbralMatrix<S> diag_indeterminates(const std::string& name, unsigned count) {
  std::vector<Polynomial<S>> entries;
  for (const auto& x : Indeterminate::family(name, count)) entries.emplace_back(x);
  return UmbralMatrix<S>::diagonal(entries);
}

template <Scalar S>
UmbralMatrix<S> diag_umbrae(std::span<const Umbra> umbrae) {
  std::vector<Polynomial<S>> entries(umbrae.begin(), umbrae.end());
  return UmbralMatrix<S>::diagonal(entries);
}

/// rows x cols matrix of indeterminates name_{rc} (1-based, e.g. m_12).
template <Scalar S>
UmbralMatrix<S> symbolic_matrix(const std::string& name, std::size_t rows, std::size_t cols) {
  UmbralMatrix<S> out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out(r, c) = Polynomial<S>(Indeterminate(name + "_" + std::to_string(r + 1) + std::to_string(c + 1)));
  return out;
}

/// Entrywise evaluation.
template <Scalar S>
UmbralMatrix<S> eval(const UmbralMatrix<S>& a) {
  return a.map([](const Polynomial<S>& v) { return eval(v); });
}

/// Determinant of an umbral matrix (Leibniz sum, size-limited).
template <Scalar S>
Polynomial<S> det(const UmbralMatrix<S>& a, std::size_t limit = kLeibnizLimit) {
  return det_leibniz(a, limit);
}

}  // namespace polytrace
