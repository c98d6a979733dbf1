#include <random>

#include "cli/random_instances.h"
#include "doctest.h"
#include "polytrace/combinatorics.h"
#include "polytrace/error.h"
#include "polytrace/oracles.h"
#include "polytrace/wishart.h"

using namespace polytrace;
using polytrace::cli::RationalSource;

namespace {

using P = RationalPolynomial;
using RM = Matrix<Rational>;

P sq(const P& v) { return v * v; }
P ind(const std::string& name) { return P(Indeterminate(name)); }

TraceModel<Rational> numeric_model(const RM& sigma, const RM& mean, const std::vector<Rational>& y,
                                   const std::vector<Rational>& x) {
  TraceModel<Rational> model{lift(sigma), lift(mean), {}, {}};
  for (const auto& v : y) model.y.emplace_back(v);
  for (const auto& v : x) model.x.emplace_back(v);
  return model;
}

TraceModel<Rational> worked_model() {
  const auto theta = Indeterminate::family("theta", 2);
  std::vector<P> thetas(theta.begin(), theta.end());
  return TraceModel<Rational>::symbolic(UmbralMatrix<Rational>::diagonal(thetas),
                                        symbolic_matrix<Rational>("m", 2, 3));
}

// Total degree of a monomial in the indeterminates of a family.
unsigned family_degree(const MonomialKey& key, const std::vector<Indeterminate>& family) {
  unsigned d = 0;
  for (const auto& v : family) d += key.degree_in(v.id());
  return d;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(WishartParams<Rational>::make(2, RM::identity(2)));
  CHECK_THROWS_WITH(WishartParams<Rational>::make(1, RM::identity(2)), doctest::Contains("n must be at least p"));
  CHECK_THROWS_WITH(WishartParams<Rational>::make(2, RM(2, 2, {Rational(1), Rational(2), Rational(3), Rational(1)})),
                    doctest::Contains("not symmetric"));
  CHECK_THROWS_WITH(WishartParams<Rational>::make(2, RM(2, 2, {Rational(1), Rational(2), Rational(2), Rational(1)})),
                    doctest::Contains("not positive definite"));
  CHECK_THROWS_WITH(WishartParams<Rational>::make(3, RM::identity(2), RM(2, 2)), doctest::Contains("p x n"));
  const Matrix<double> nearly(2, 2, {1.0, 0.5, 0.5 + 1e-14, 1.0});
  CHECK_NOTHROW(WishartParams<double>::make(2, nearly));
  const Matrix<double> off(2, 2, {1.0, 0.5, 0.5 + 1e-9, 1.0});
  CHECK_THROWS_AS(WishartParams<double>::make(2, off), Error);
}

TEST_CASE("central cumulant of the worked example") {
  const auto model = worked_model();
  const P want = (sq(ind("x_1")) + sq(ind("x_2")) + sq(ind("x_3"))) *
                 (sq(ind("y_1")) * ind("theta_1") + sq(ind("y_2")) * ind("theta_2"));
  CHECK(cumulant_q(model, 1) == want);
}

TEST_CASE("mean cumulant of the worked example") {
  const auto model = worked_model();
  P want;
  for (unsigned a = 1; a <= 2; ++a) {
    P inner;
    for (unsigned j = 1; j <= 3; ++j)
      inner += sq(ind("m_" + std::to_string(a) + std::to_string(j))) * sq(ind("x_" + std::to_string(j)));
    want += sq(ind("y_" + std::to_string(a))) * inner;
  }
  CHECK(cumulant_qtilde(model, 1) == want);
  CHECK(cumulant(model, 1) == cumulant_q(model, 1) + want);
  CHECK(trace_moment(model, 1) == cumulant(model, 1));
}

TEST_CASE("cumulant special cases") {
  for (unsigned p = 1; p <= 3; ++p) {
    const unsigned n = p + 1;
    const auto model = numeric_model(RM::identity(p), RM(p, n), std::vector<Rational>(p, Rational(1)),
                                     std::vector<Rational>(n, Rational(1)));
    CHECK(*cumulant_q(model, 1).as_constant() == Rational(n * p));
    for (unsigned k = 1; k <= 3; ++k) CHECK(cumulant_qtilde(model, k).is_zero());
  }
  const auto zero = TraceModel<Rational>::symbolic(lift(RM(2, 2)), lift(RM(2, 3)));
  for (unsigned k = 1; k <= 3; ++k) CHECK(cumulant_q(zero, k).is_zero());
  CHECK(trace_moment(zero, 1).is_zero());

  // p = n = 1, Sigma = (s), M = (m): q~_2 = 4 y^4 x^4 s m^2.
  const auto scalar = TraceModel<Rational>::symbolic(symbolic_matrix<Rational>("s", 1, 1),
                                                     symbolic_matrix<Rational>("mu", 1, 1));
  const P y = ind("y_1");
  const P x = ind("x_1");
  const P want = (sq(sq(y)) * sq(sq(x)) * ind("s_11") * sq(ind("mu_11"))).scaled(Rational(4));
  CHECK(cumulant_qtilde(scalar, 2) == want);

  // i = 2, M = 0, p = n = 1, Sigma = (theta): 3 x^4 y^4 theta^2.
  const auto central = TraceModel<Rational>::symbolic(symbolic_matrix<Rational>("theta", 1, 1), lift(RM(1, 1)));
  CHECK(trace_moment(central, 2) == (sq(sq(y)) * sq(sq(x)) * sq(ind("theta_11"))).scaled(Rational(3)));
  CHECK_THROWS_AS(cumulant_q(central, 0), Error);
}

TEST_CASE("cumulants are homogeneous of degree 2k in y and in x") {
  const auto model = TraceModel<Rational>::symbolic(symbolic_matrix<Rational>("s", 2, 2),
                                                    symbolic_matrix<Rational>("m", 2, 3));
  const auto ys = Indeterminate::family("y", 2);
  const auto xs = Indeterminate::family("x", 3);
  for (unsigned k = 1; k <= 3; ++k) {
    const P c = cumulant(model, k);
    for (const auto& [key, coeff] : c.terms()) {
      CHECK(family_degree(key, ys) == 2 * k);
      CHECK(family_degree(key, xs) == 2 * k);
    }
  }
}

TEST_CASE("delta substitution keeps only c_1^i") {
  RationalSource src(41);
  for (unsigned p = 1; p <= 3; ++p) {
    const unsigned n = p + 1;
    const auto sigma = src.diagonal_spd(p);
    const auto mean = src.rect_diagonal(p, n);
    const auto model = TraceModel<Rational>::symbolic(lift(sigma), lift(mean), "y", "x");
    const auto dp = make_delta_family(p);
    const auto dn = make_delta_family(n);
    std::unordered_map<SymbolId, P> repl;
    const auto ys = Indeterminate::family("y", p);
    const auto xs = Indeterminate::family("x", n);
    for (unsigned l = 0; l < p; ++l) repl.emplace(ys[l].id(), P(dp[l]));
    for (unsigned j = 0; j < n; ++j) repl.emplace(xs[j].id(), P(dn[j]));
    for (unsigned i = 1; i <= p; ++i) {
      const P full = eval(substitute(trace_moment(model, i), repl));
      const P first = eval(pow(substitute(cumulant(model, 1), repl), i));
      CHECK(full == first);
      CHECK(umbral_frame_moment<Rational>(n, lift(sigma), lift(mean), i) == full);
    }
  }
}

TEST_CASE("umbral route examples") {
  for (unsigned p = 1; p <= 3; ++p)
    for (unsigned n = p; n <= 5; ++n) {
      const auto params = WishartParams<Rational>::make(n, RM::identity(p));
      for (unsigned i = 0; i <= p + 1; ++i) {
        const auto v = esf_expectation_umbral(params, i);
        REQUIRE(v.exact.has_value());
        const Rational want =
            i > p ? Rational(0) : ratio(falling_factorial(n, i) * falling_factorial(p, i), factorial(i));
        CHECK(*v.exact == want);
        CHECK(v.regime == (i == 0 || i > p ? Regime::trivial : Regime::central));
      }
    }
  const auto one = WishartParams<Rational>::make(1, RM::identity(1), RM(1, 1, {ratio(3, 2)}));
  const auto v = esf_expectation_umbral(one, 1);
  CHECK(*v.exact == Rational(1) + ratio(9, 4));
  CHECK(wick_expectation(one, 1) == *v.exact);
}

TEST_CASE("scaled identity with p = n = 1 gives sigma^2 + m^2") {
  const auto params = WishartParams<Rational>::make(1, RM(1, 1, {Rational(4)}), RM(1, 1, {Rational(3)}));
  CHECK(closed_form_scaled_identity(params, 1) == 13);
  CHECK(*esf_expectation_umbral(params, 1).exact == 13);
  CHECK(wick_expectation(params, 1) == 13);
}

TEST_CASE("closed form examples") {
  const auto params = WishartParams<Rational>::make(3, RM::diagonal(std::vector<Rational>{1, 2}));
  CHECK(esf_expectation_closed_form(params, 2) == 12);
  CHECK(esf_expectation_closed_form(params, 0) == 1);
  CHECK(esf_expectation_closed_form(params, 3) == 0);
  CHECK_THROWS_WITH(closed_form_scaled_identity(params, 1), doctest::Contains("scaled identity"));

  RationalSource src(43);
  for (unsigned p = 1; p <= 3; ++p)
    for (unsigned trial = 0; trial < 4; ++trial) {
      const unsigned n = p + trial % 2;
      const auto sigma = src.spd(p);
      const auto mean = src.dense(p, n);
      const auto prm = WishartParams<Rational>::make(n, sigma, mean);
      CHECK(closed_form_full_rank(prm) == closed_form_general(prm, p));
      const auto iso = WishartParams<Rational>::make(n, scale(ratio(9, 4), RM::identity(p)), mean);
      for (unsigned i = 1; i <= p; ++i) CHECK(closed_form_scaled_identity(iso, i) == closed_form_general(iso, i));
      const auto central = WishartParams<Rational>::make(n, sigma);
      for (unsigned i = 1; i <= p; ++i) CHECK(closed_form_central(central, i) == closed_form_general(central, i));
    }
}

TEST_CASE("umbral and closed-form routes agree") {
  RationalSource src(47);
  for (unsigned p = 1; p <= 4; ++p)
    for (unsigned n = p; n <= std::min(6u, p + 2); ++n) {
      const auto diag_central = WishartParams<Rational>::make(n, src.diagonal_spd(p));
      const auto iso_diag = WishartParams<Rational>::make(n, scale(ratio(1, 4), RM::identity(p)),
                                                          src.rect_diagonal(p, n));
      const auto general = WishartParams<Rational>::make(n, src.spd(p), src.dense(p, n));
      for (unsigned i = 1; i <= p; ++i) {
        const auto a = esf_expectation_umbral(diag_central, i);
        CHECK(*a.exact == esf_expectation_closed_form(diag_central, i));
        const auto b = esf_expectation_umbral(iso_diag, i);
        CHECK(*b.exact == esf_expectation_closed_form(iso_diag, i));
        const auto c = esf_expectation_umbral(general, i);
        if (p > 1) {
          CHECK_FALSE(c.exact.has_value());
          CHECK(c.regime == (i == p ? Regime::full_rank : Regime::submatrix));
        }
        const double want = esf_expectation_closed_form(general, i).get_d();
        CHECK(c.value == doctest::Approx(want).epsilon(1e-8));
      }
    }
}

TEST_CASE("float mode matches rational mode") {
  RationalSource src(53);
  const auto sigma = src.spd(3);
  const auto mean = src.dense(3, 4);
  const auto exact = WishartParams<Rational>::make(4, sigma, mean);
  const auto floating = WishartParams<double>::make(4, to_double(sigma), to_double(mean));
  for (unsigned i = 0; i <= 4; ++i) {
    const double want = esf_expectation_closed_form(exact, i).get_d();
    CHECK(esf_expectation_closed_form(floating, i) == doctest::Approx(want).epsilon(1e-10));
    CHECK(esf_expectation_umbral(floating, i).value == doctest::Approx(want).epsilon(1e-8));
  }
  const auto central = WishartParams<double>::make(4, to_double(sigma));
  const auto central_exact = WishartParams<Rational>::make(4, sigma);
  for (unsigned i = 1; i <= 3; ++i)
    CHECK(esf_expectation_umbral(central, i).value ==
          doctest::Approx(esf_expectation_closed_form(central_exact, i).get_d()).epsilon(1e-10));
}

TEST_CASE("trace moments match Wick at numeric points") {
  RationalSource src(59);
  for (unsigned trial = 0; trial < 4; ++trial) {
    const unsigned p = 1 + trial % 2;
    const unsigned n = 2;
    const auto sigma = src.spd(p);
    const auto mean = src.dense(p, n);
    const auto y = src.vector(p);
    const auto x = src.vector(n);
    const auto model = numeric_model(sigma, mean, y, x);
    const auto params = WishartParams<Rational>::make(n, sigma, mean);
    for (unsigned i = 1; i <= 2; ++i)
      CHECK(*trace_moment(model, i).as_constant() == wick_trace_moment(params, i, y, x));
  }
}

TEST_CASE("non-central chi-square cumulants") {
  const RM sigma(2, 2, {Rational(2), ratio(1, 2), ratio(1, 2), Rational(1)});
  const std::vector<Rational> m{Rational(1), Rational(-2)};
  CHECK(noncentral_chisq_cumulant<Rational>(sigma, m, 1) == Rational(3) + Rational(5));
  for (unsigned p = 1; p <= 3; ++p)
    for (unsigned k = 1; k <= 4; ++k)
      CHECK(noncentral_chisq_cumulant<Rational>(RM::identity(p), std::vector<Rational>(p, Rational(0)), k) ==
            Rational(factorial(k - 1) * (Integer(1) << (k - 1)) * p));
  const RM theta = RM::diagonal(std::vector<Rational>{2, 3, ratio(1, 2)});
  CHECK(noncentral_chisq_cumulant<Rational>(theta, std::vector<Rational>(3, Rational(0)), 2) ==
        Rational(2) * (Rational(4) + Rational(9) + ratio(1, 4)));

  const auto q = quadratic_form_umbra(sigma, m);
  std::vector<Rational> kappa;
  for (unsigned k = 1; k <= 4; ++k) kappa.push_back(noncentral_chisq_cumulant<Rational>(sigma, m, k));
  const auto moments = moments_from_cumulants<Rational>(kappa);
  const auto gf = gf_coefficients(q, 4);
  for (unsigned k = 1; k <= 4; ++k) CHECK(*gf[k].as_constant() * Rational(factorial(k)) == moments[k - 1]);
}

TEST_CASE("double-singleton identity") {
  const std::vector<Rational> m{Rational(1), ratio(-1, 2), Rational(3)};
  for (unsigned n = 1; n <= 4; ++n)
    for (unsigned i = 0; i <= std::min(3u, n); ++i) {
      const auto j0 = desf_conjecture_identity(3, n, i, 0, m);
      CHECK(j0.kernel == Rational(binomial(n, i) * binomial(3, i)));
      CHECK(j0.kernel == j0.reference);
      std::vector<Rational> squares;
      for (unsigned k = 0; k < std::min(3u, n); ++k) squares.push_back(m[k] * m[k]);
      const auto ji = desf_conjecture_identity(3, n, i, i, m);
      CHECK(ji.kernel == esf_direct<Rational>(squares, i));
      for (unsigned j = 0; j <= i; ++j) {
        const auto c = desf_conjecture_identity(3, n, i, j, m);
        CHECK(c.kernel == c.reference);
        CHECK(c.cross_term == c.reference * Rational(factorial(i - j)));
      }
    }
  const auto zero = desf_conjecture_identity(3, 3, 2, 1, std::vector<Rational>(3, Rational(0)));
  CHECK(zero.kernel == 0);
  CHECK(zero.reference == 0);
  CHECK_THROWS_AS(desf_conjecture_identity(2, 2, 1, 2, std::vector<Rational>(2, Rational(1))), Error);
}

TEST_CASE("regime names") {
  CHECK(std::string(to_string(Regime::central)) == "central");
  CHECK(std::string(to_string(Regime::submatrix)) == "submatrix");
}
