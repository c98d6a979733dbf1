#include <benchmark/benchmark.h>

#include "polytrace/oracles.h"
#include "polytrace/wishart.h"

using namespace polytrace;

namespace {

Matrix<Rational> test_sigma(unsigned p) {
  Matrix<Rational> s(p, p);
  for (unsigned r = 0; r < p; ++r)
    for (unsigned c = 0; c < p; ++c) s(r, c) = r == c ? Rational(p + 1) : ratio(1, r + c + 2);
  return s;
}

Matrix<Rational> test_mean(unsigned p, unsigned n) {
  Matrix<Rational> m(p, n);
  for (unsigned r = 0; r < p; ++r)
    for (unsigned c = 0; c < n; ++c) m(r, c) = ratio(static_cast<int>(r) - static_cast<int>(c), c + 1);
  return m;
}

void BM_PolynomialPower(benchmark::State& state) {
  const auto xs = Indeterminate::family("x", 4);
  RationalPolynomial sum;
  for (const auto& x : xs) sum += RationalPolynomial(x);
  for (auto _ : state) benchmark::DoNotOptimize(pow(sum, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_PolynomialPower)->DenseRange(2, 8, 2);

void BM_UmbralCentral(benchmark::State& state) {
  const unsigned p = static_cast<unsigned>(state.range(0));
  const auto params = WishartParams<Rational>::make(p + 2, test_sigma(p));
  for (auto _ : state) benchmark::DoNotOptimize(esf_expectation_umbral(params, p));
}
BENCHMARK(BM_UmbralCentral)->DenseRange(1, 4);

void BM_UmbralGeneral(benchmark::State& state) {
  const unsigned p = static_cast<unsigned>(state.range(0));
  const auto params = WishartParams<Rational>::make(p + 2, test_sigma(p), test_mean(p, p + 2));
  for (auto _ : state) benchmark::DoNotOptimize(esf_expectation_umbral(params, p));
}
BENCHMARK(BM_UmbralGeneral)->DenseRange(1, 4);

void BM_ClosedFormGeneral(benchmark::State& state) {
  const unsigned p = static_cast<unsigned>(state.range(0));
  const auto params = WishartParams<Rational>::make(p + 2, test_sigma(p), test_mean(p, p + 2));
  for (auto _ : state) benchmark::DoNotOptimize(closed_form_general(params, p / 2 + 1));
}
BENCHMARK(BM_ClosedFormGeneral)->DenseRange(1, 6);

void BM_Wick(benchmark::State& state) {
  const auto params = WishartParams<Rational>::make(3, test_sigma(2), test_mean(2, 3));
  for (auto _ : state) benchmark::DoNotOptimize(wick_expectation(params, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_Wick)->DenseRange(1, 2);

void BM_MonteCarlo(benchmark::State& state) {
  const unsigned p = static_cast<unsigned>(state.range(0));
  const auto params = WishartParams<double>::make(p + 2, to_double(test_sigma(p)), to_double(test_mean(p, p + 2)));
  for (auto _ : state) benchmark::DoNotOptimize(mc_estimate_all(params, p, 10000, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_MonteCarlo)->DenseRange(2, 6, 2);

}  // namespace
BENCHMARK_MAIN();
