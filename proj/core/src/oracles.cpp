#include "polytrace/oracles.h"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "polytrace/combinatorics.h"
#include "polytrace/error.h"

namespace polytrace {

Rational isserlis(const Matrix<Rational>& cov, std::span<const std::size_t> indices) {
  if (indices.size() % 2 == 1) return Rational(0);
  Rational total(0);
  for (const auto& matching : enumerate_pair_partitions(static_cast<unsigned>(indices.size()))) {
    Rational term(1);
    for (const auto& [a, b] : matching) {
      term *= cov(indices[a], indices[b]);
      if (term == 0) break;
    }
    total += term;
  }
  return total;
}

namespace {

struct WickEntries {
  std::vector<Indeterminate> symbols;  // row-major a * n + j
  std::unordered_map<SymbolId, std::size_t> slot;
};

WickEntries wick_entries(unsigned p, unsigned n) {
  WickEntries out;
  for (unsigned a = 0; a < p; ++a)
    for (unsigned j = 0; j < n; ++j) {
      out.symbols.emplace_back("X_" + std::to_string(a + 1) + "_" + std::to_string(j + 1));
      out.slot.emplace(out.symbols.back().id(), out.symbols.size() - 1);
    }
  return out;
}

void check_wick_limit(const WishartParams<Rational>& params, unsigned i) {
  if (static_cast<unsigned long>(params.p()) * params.n * i > kWickLimit) throw Error("wick oracle limit");
}

// E of a monomial prod X_s^{e_s} with X = M + G. Each factor is split
// binomially into M^{e-f} G^f; the G part goes to Isserlis with
// Cov(G_aj, G_bk) = Sigma_ab [j = k].
class MonomialExpectation {
 public:
  MonomialExpectation(const WishartParams<Rational>& params, const WickEntries& entries)
      : params_(params), entries_(entries) {
    const std::size_t count = entries.symbols.size();
    cov_ = Matrix<Rational>(count, count);
    const unsigned n = params.n;
    for (std::size_t s = 0; s < count; ++s)
      for (std::size_t t = 0; t < count; ++t)
        if (s % n == t % n) cov_(s, t) = params.sigma(s / n, t / n);
  }

  Rational operator()(const MonomialKey& key) const {
    if (!key.umbrae.empty()) throw Error("wick expansion produced an umbra");
    std::vector<std::pair<std::size_t, unsigned>> factors;
    for (const auto& pw : key.indeterminates) factors.emplace_back(entries_.slot.at(pw.id), pw.exponent);
    std::vector<std::size_t> centred;
    return expand(factors, 0, Rational(1), centred);
  }

 private:
  Rational expand(const std::vector<std::pair<std::size_t, unsigned>>& factors, std::size_t pos,
                  const Rational& weight, std::vector<std::size_t>& centred) const {
    if (weight == 0) return Rational(0);
    if (pos == factors.size()) return weight * isserlis(cov_, centred);
    const auto [slot, e] = factors[pos];
    const Rational& m = params_.mean(slot / params_.n, slot % params_.n);
    Rational total(0);
    for (unsigned f = 0; f <= e; ++f) {
      Rational w = weight * Rational(binomial(e, f));
      for (unsigned r = 0; r < e - f; ++r) w *= m;
      for (unsigned r = 0; r < f; ++r) centred.push_back(slot);
      total += expand(factors, pos + 1, w, centred);
      centred.resize(centred.size() - f);
    }
    return total;
  }

  const WishartParams<Rational>& params_;
  const WickEntries& entries_;
  Matrix<Rational> cov_;
};

Rational expectation_of(const RationalPolynomial& poly, const WishartParams<Rational>& params,
                        const WickEntries& entries) {
  const MonomialExpectation expect(params, entries);
  Rational total(0);
  for (const auto& [key, c] : poly.terms()) total += c * expect(key);
  return total;
}

UmbralMatrix<Rational> symbolic_x(const WickEntries& entries, unsigned p, unsigned n) {
  UmbralMatrix<Rational> x(p, n);
  for (unsigned a = 0; a < p; ++a)
    for (unsigned j = 0; j < n; ++j) x(a, j) = RationalPolynomial(entries.symbols[a * n + j]);
  return x;
}

}  // namespace

Rational wick_expectation(const WishartParams<Rational>& params, unsigned i) {
  params.validate();
  check_wick_limit(params, i);
  const unsigned p = params.p();
  if (i == 0) return Rational(1);
  if (i > p) return Rational(0);
  const auto entries = wick_entries(p, params.n);
  const auto x = symbolic_x(entries, p, params.n);
  const auto w = matmul(x, transpose(x));
  RationalPolynomial esf;
  for (const auto& idx : index_subsets(p, i)) esf += det_leibniz(principal_submatrix(w, std::span<const std::size_t>(idx)));
  return expectation_of(esf, params, entries);
}

Rational wick_trace_moment(const WishartParams<Rational>& params, unsigned i, std::span<const Rational> y,
                           std::span<const Rational> x) {
  params.validate();
  check_wick_limit(params, i);
  const unsigned p = params.p();
  const unsigned n = params.n;
  if (y.size() != p || x.size() != n) throw Error("y must have length p and x length n");
  const auto entries = wick_entries(p, n);
  RationalPolynomial tr;
  for (unsigned a = 0; a < p; ++a)
    for (unsigned j = 0; j < n; ++j) {
      const RationalPolynomial e(entries.symbols[a * n + j]);
      tr += e * e * RationalPolynomial(Rational(y[a] * y[a] * x[j] * x[j]));
    }
  return expectation_of(pow(tr, i), params, entries);
}

double NormalStream::uniform() {
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

namespace {

// Running mean and variance (Welford).
class Welford {
 public:
  void add(double v) {
    ++count_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (v - mean_);
  }
  Estimate result(std::uint64_t seed) const {
    Estimate out;
    out.value = mean_;
    out.samples = count_;
    out.seed = seed;
    out.std_error = count_ > 1 ? std::sqrt(m2_ / static_cast<double>(count_ - 1) / static_cast<double>(count_)) : 0.0;
    return out;
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Draws X = M + L Z column by column into `x` (row-major p x n).
class MatrixNormalSampler {
 public:
  MatrixNormalSampler(const Matrix<double>& sigma, const Matrix<double>& mean, std::uint64_t seed)
      : p_(static_cast<unsigned>(mean.rows())), n_(static_cast<unsigned>(mean.cols())), lower_(cholesky(sigma)),
        mean_(mean), normals_(seed), z_(p_), x_(static_cast<std::size_t>(p_) * n_) {}

  const std::vector<double>& draw() {
    for (unsigned j = 0; j < n_; ++j) {
      for (unsigned a = 0; a < p_; ++a) z_[a] = normals_.next();
      for (unsigned a = 0; a < p_; ++a) {
        double v = mean_(a, j);
        for (unsigned b = 0; b <= a; ++b) v += lower_(a, b) * z_[b];
        x_[a * n_ + j] = v;
      }
    }
    return x_;
  }

  unsigned p() const { return p_; }
  unsigned n() const { return n_; }

 private:
  unsigned p_;
  unsigned n_;
  Matrix<double> lower_;
  Matrix<double> mean_;
  NormalStream normals_;
  std::vector<double> z_;
  std::vector<double> x_;
};

// Determinant of the principal block `mask` of the p x p row-major `w`,
// by elimination with partial pivoting on a scratch copy.
double masked_minor(const std::vector<double>& w, unsigned p, unsigned mask, std::vector<double>& scratch) {
  std::array<unsigned, 64> idx{};
  unsigned k = 0;
  for (unsigned a = 0; a < p; ++a)
    if (mask & (1u << a)) idx[k++] = a;
  scratch.resize(static_cast<std::size_t>(k) * k);
  for (unsigned r = 0; r < k; ++r)
    for (unsigned c = 0; c < k; ++c) scratch[r * k + c] = w[idx[r] * p + idx[c]];
  double det = 1.0;
  for (unsigned c = 0; c < k; ++c) {
    unsigned pivot = c;
    for (unsigned r = c + 1; r < k; ++r)
      if (std::abs(scratch[r * k + c]) > std::abs(scratch[pivot * k + c])) pivot = r;
    if (scratch[pivot * k + c] == 0.0) return 0.0;
    if (pivot != c) {
      for (unsigned t = 0; t < k; ++t) std::swap(scratch[c * k + t], scratch[pivot * k + t]);
      det = -det;
    }
    const double d = scratch[c * k + c];
    det *= d;
    for (unsigned r = c + 1; r < k; ++r) {
      const double f = scratch[r * k + c] / d;
      if (f == 0.0) continue;
      for (unsigned t = c + 1; t < k; ++t) scratch[r * k + t] -= f * scratch[c * k + t];
    }
  }
  return det;
}

void require_samples(std::uint64_t samples) {
  if (samples < 2) throw Error("monte carlo needs at least 2 samples");
}

}  // namespace

std::vector<Estimate> mc_estimate_all(const WishartParams<double>& params, unsigned max_i, std::uint64_t samples,
                                      std::uint64_t seed) {
  params.validate();
  require_samples(samples);
  const unsigned p = params.p();
  if (p >= 32) throw Error("monte carlo supports p < 32");
  const unsigned n = params.n;
  const unsigned top = std::min(max_i, p);

  std::vector<Estimate> out(max_i + 1);
  for (auto& e : out) {
    e.samples = samples;
    e.seed = seed;
  }
  out[0].value = 1.0;
  if (top == 0) return out;

  std::vector<unsigned> masks;
  for (unsigned mask = 1; mask < (1u << p); ++mask)
    if (static_cast<unsigned>(std::popcount(mask)) <= top) masks.push_back(mask);

  MatrixNormalSampler sampler(params.sigma, params.mean, seed);
  std::vector<Welford> acc(top + 1);
  std::vector<double> w(static_cast<std::size_t>(p) * p);
  std::vector<double> esf(top + 1);
  std::vector<double> scratch;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto& x = sampler.draw();
    for (unsigned a = 0; a < p; ++a)
      for (unsigned b = 0; b <= a; ++b) {
        double v = 0.0;
        for (unsigned j = 0; j < n; ++j) v += x[a * n + j] * x[b * n + j];
        w[a * p + b] = v;
        w[b * p + a] = v;
      }
    std::fill(esf.begin(), esf.end(), 0.0);
    for (unsigned mask : masks) esf[std::popcount(mask)] += masked_minor(w, p, mask, scratch);
    for (unsigned k = 1; k <= top; ++k) acc[k].add(esf[k]);
  }
  for (unsigned k = 1; k <= top; ++k) out[k] = acc[k].result(seed);
  return out;
}

Estimate mc_estimate(const WishartParams<double>& params, unsigned i, std::uint64_t samples, std::uint64_t seed) {
  return mc_estimate_all(params, i, samples, seed)[i];
}

Estimate mc_trace_moment(const WishartParams<double>& params, unsigned i, std::span<const double> y,
                         std::span<const double> x, std::uint64_t samples, std::uint64_t seed) {
  params.validate();
  require_samples(samples);
  const unsigned p = params.p();
  const unsigned n = params.n;
  if (y.size() != p || x.size() != n) throw Error("y must have length p and x length n");
  MatrixNormalSampler sampler(params.sigma, params.mean, seed);
  Welford acc;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const auto& draw = sampler.draw();
    double tr = 0.0;
    for (unsigned a = 0; a < p; ++a)
      for (unsigned j = 0; j < n; ++j) {
        const double v = y[a] * draw[a * n + j] * x[j];
        tr += v * v;
      }
    double power = 1.0;
    for (unsigned r = 0; r < i; ++r) power *= tr;
    acc.add(power);
  }
  return acc.result(seed);
}

std::vector<Estimate> mc_quadratic_form_cumulants(const Matrix<double>& sigma, std::span<const double> m,
                                                  unsigned order, std::uint64_t samples, std::uint64_t seed,
                                                  unsigned batches) {
  if (order == 0 || order > 4) throw Error("cumulant order must be between 1 and 4");
  if (batches < 2 || samples / batches < 4) throw Error("need at least two batches of four samples");
  if (!sigma.is_square() || m.size() != sigma.rows()) throw Error("sigma and m shapes disagree");
  const Matrix<double> mean(m.size(), 1, std::vector<double>(m.begin(), m.end()));
  MatrixNormalSampler sampler(sigma, mean, seed);

  const std::uint64_t per_batch = samples / batches;
  const double nb = static_cast<double>(per_batch);
  std::vector<Welford> acc(order);
  std::vector<double> q(per_batch);
  for (unsigned b = 0; b < batches; ++b) {
    double sum = 0.0;
    for (auto& v : q) {
      const auto& x = sampler.draw();
      v = 0.0;
      for (double e : x) v += e * e;
      sum += v;
    }
    const double mean_q = sum / nb;
    double s2 = 0.0;
    double s3 = 0.0;
    double s4 = 0.0;
    for (double v : q) {
      const double d = v - mean_q;
      const double d2 = d * d;
      s2 += d2;
      s3 += d2 * d;
      s4 += d2 * d2;
    }
    // Unbiased k-statistics from central power sums.
    const double k1 = mean_q;
    const double k2 = s2 / (nb - 1.0);
    const double k3 = nb * s3 / ((nb - 1.0) * (nb - 2.0));
    const double k4 = (nb * (nb + 1.0) * s4 - 3.0 * (nb - 1.0) * s2 * s2) / ((nb - 1.0) * (nb - 2.0) * (nb - 3.0));
    const std::array<double, 4> k{k1, k2, k3, k4};
    for (unsigned r = 0; r < order; ++r) acc[r].add(k[r]);
  }
  std::vector<Estimate> out;
  for (unsigned r = 0; r < order; ++r) {
    Estimate e = acc[r].result(seed);
    e.samples = per_batch * batches;
    out.push_back(e);
  }
  return out;
}

}  // namespace polytrace
