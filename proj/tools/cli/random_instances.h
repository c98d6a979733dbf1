#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "polytrace/matrix.h"
#include "polytrace/scalar.h"

namespace polytrace::cli {

/// Seeded source of small random rationals and test matrices.
class RationalSource {
 public:
  explicit RationalSource(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// a/b with |a| <= max_num, 1 <= b <= max_den.
  Rational rational(int max_num = 5, int max_den = 4) {
    return ratio(integer(-max_num, max_num), integer(1, max_den));
  }

  Rational positive(int max_num = 5, int max_den = 4) {
    return ratio(integer(1, max_num), integer(1, max_den));
  }

  std::vector<Rational> vector(std::size_t size) {
    std::vector<Rational> out;
    for (std::size_t k = 0; k < size; ++k) out.push_back(rational());
    return out;
  }

  Matrix<Rational> diagonal_spd(std::size_t p) {
    std::vector<Rational> d;
    for (std::size_t k = 0; k < p; ++k) d.push_back(positive());
    return Matrix<Rational>::diagonal(d);
  }

  /// B B^T + D with B dense and D positive diagonal, so always SPD.
  Matrix<Rational> spd(std::size_t p) {
    const Matrix<Rational> b = dense(p, p, 2, 3);
    Matrix<Rational> out = matmul(b, transpose(b));
    for (std::size_t k = 0; k < p; ++k) out(k, k) += positive(3, 2);
    return out;
  }

  Matrix<Rational> dense(std::size_t rows, std::size_t cols, int max_num = 5, int max_den = 4) {
    Matrix<Rational> out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) out(r, c) = rational(max_num, max_den);
    return out;
  }

  /// p x n with only the (k, k) entries filled.
  Matrix<Rational> rect_diagonal(std::size_t rows, std::size_t cols) {
    std::vector<Rational> d;
    for (std::size_t k = 0; k < std::min(rows, cols); ++k) d.push_back(rational());
    return Matrix<Rational>::rect_diag(d, rows, cols);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace polytrace::cli
