#include <cmath>
#include <vector>

#include "doctest.h"
#include "polytrace/error.h"
#include "polytrace/oracles.h"

using namespace polytrace;

namespace {
using RM = Matrix<Rational>;
using DM = Matrix<double>;
}  // namespace

TEST_CASE("Isserlis moments") {
  const RM cov(2, 2, {Rational(2), Rational(1), Rational(1), Rational(3)});
  const std::vector<std::size_t> none;
  CHECK(isserlis(cov, none) == 1);
  const std::vector<std::size_t> odd{0, 1, 1};
  CHECK(isserlis(cov, odd) == 0);
  const std::vector<std::size_t> four{0, 0, 0, 0};
  CHECK(isserlis(cov, four) == 3 * 4);
  const std::vector<std::size_t> six{1, 1, 1, 1, 1, 1};
  CHECK(isserlis(cov, six) == 15 * 27);
  // E[G0^2 G1^2] = s00 s11 + 2 s01^2.
  const std::vector<std::size_t> mixed{0, 0, 1, 1};
  CHECK(isserlis(cov, mixed) == 2 * 3 + 2 * 1);
}

TEST_CASE("Wick oracle examples") {
  CHECK(wick_expectation(WishartParams<Rational>::make(1, RM::identity(1)), 1) == 1);
  CHECK(wick_expectation(WishartParams<Rational>::make(1, RM::identity(1), RM(1, 1, {Rational(2)})), 1) == 5);
  CHECK(wick_expectation(WishartParams<Rational>::make(2, RM::identity(2)), 2) == 2);
  CHECK(wick_expectation(WishartParams<Rational>::make(3, RM::identity(2)), 0) == 1);
  CHECK(wick_expectation(WishartParams<Rational>::make(2, RM::identity(1)), 2) == 0);
  CHECK_THROWS_WITH(wick_expectation(WishartParams<Rational>::make(4, RM::identity(2)), 2),
                    doctest::Contains("wick oracle limit"));
}

TEST_CASE("Wick trace moment of a scalar chi-square") {
  // p = n = 1, y = x = 1, Sigma = 1, M = 0: E[X^4] = 3.
  const auto params = WishartParams<Rational>::make(1, RM::identity(1));
  const std::vector<Rational> one{Rational(1)};
  CHECK(wick_trace_moment(params, 2, one, one) == 3);
  CHECK_THROWS_AS(wick_trace_moment(params, 1, std::vector<Rational>{}, one), Error);
}

TEST_CASE("normal stream is pinned") {
  NormalStream a(1);
  NormalStream b(1);
  std::vector<double> first;
  for (int k = 0; k < 8; ++k) {
    const double v = a.next();
    CHECK(v == b.next());
    CHECK(std::isfinite(v));
    first.push_back(v);
  }
  NormalStream c(2);
  CHECK(c.next() != first[0]);

  // Reconstruct the first pair from the engine directly.
  std::mt19937_64 engine(1);
  const auto uniform = [&] { return (static_cast<double>(engine() >> 11) + 0.5) * 0x1p-53; };
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * M_PI * u2;
  CHECK(first[0] == r * std::cos(t));
  CHECK(first[1] == r * std::sin(t));
}

TEST_CASE("normal stream moments") {
  NormalStream s(77);
  double sum = 0.0;
  double sq = 0.0;
  const int count = 200000;
  for (int k = 0; k < count; ++k) {
    const double v = s.next();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / count) < 0.01);
  CHECK(std::abs(sq / count - 1.0) < 0.01);
}

TEST_CASE("Monte Carlo estimate against the exact value") {
  const auto params = WishartParams<double>::make(3, DM::identity(2));
  const Estimate e = mc_estimate(params, 2, 1000000, 11);
  CHECK(e.samples == 1000000);
  CHECK(e.seed == 11);
  CHECK(e.std_error > 0.0);
  CHECK(std::abs(e.value - 6.0) <= 4.0 * e.std_error);

  const Estimate zero = mc_estimate(params, 0, 10, 1);
  CHECK(zero.value == 1.0);
  CHECK(zero.std_error == 0.0);
  const Estimate above = mc_estimate(params, 3, 10, 1);
  CHECK(above.value == 0.0);
  CHECK(above.std_error == 0.0);
}

TEST_CASE("Monte Carlo determinism and sample edge cases") {
  const DM sigma(2, 2, {2.0, 0.5, 0.5, 1.0});
  const DM mean(2, 3, {1.0, 0.0, -1.0, 0.5, 2.0, 0.0});
  const auto params = WishartParams<double>::make(3, sigma, mean);
  const Estimate a = mc_estimate(params, 1, 5000, 123);
  const Estimate b = mc_estimate(params, 1, 5000, 123);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  CHECK(mc_estimate(params, 1, 5000, 124).value != a.value);

  CHECK(mc_estimate(params, 1, 2, 5).std_error > 0.0);
  CHECK_THROWS_AS(mc_estimate(params, 1, 1, 5), Error);

  const auto all = mc_estimate_all(params, 3, 5000, 123);
  REQUIRE(all.size() == 4);
  for (unsigned i = 0; i <= 3; ++i) {
    const Estimate one = mc_estimate(params, i, 5000, 123);
    CHECK(all[i].value == one.value);
    CHECK(all[i].std_error == one.std_error);
  }
}

TEST_CASE("Monte Carlo trace moment") {
  const auto params = WishartParams<double>::make(2, DM::identity(1), DM(1, 2, {1.0, 0.0}));
  const std::vector<double> y{1.0};
  const std::vector<double> x{1.0, 1.0};
  // Non-central chi-square with 2 degrees of freedom and lambda = 1.
  const Estimate mean = mc_trace_moment(params, 1, y, x, 400000, 3);
  CHECK(std::abs(mean.value - 3.0) <= 4.0 * mean.std_error);
  const Estimate second = mc_trace_moment(params, 2, y, x, 400000, 3);
  // Var = 2 (k + 2 lambda) = 8, so E Q^2 = 8 + 9.
  CHECK(std::abs(second.value - 17.0) <= 4.0 * second.std_error);
}

TEST_CASE("quadratic form cumulants by Monte Carlo") {
  const DM sigma(2, 2, {1.0, 0.3, 0.3, 0.5});
  const std::vector<double> m{0.5, -1.0};
  const auto est = mc_quadratic_form_cumulants(sigma, m, 3, 400000, 9);
  REQUIRE(est.size() == 3);
  const std::vector<double> want{noncentral_chisq_cumulant<double>(sigma, m, 1),
                                 noncentral_chisq_cumulant<double>(sigma, m, 2),
                                 noncentral_chisq_cumulant<double>(sigma, m, 3)};
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(est[k].value - want[k]) <= 4.0 * est[k].std_error);
  CHECK_THROWS_AS(mc_quadratic_form_cumulants(sigma, m, 5, 1000, 1), Error);
  CHECK_THROWS_AS(mc_quadratic_form_cumulants(sigma, m, 2, 100, 1), Error);
}
