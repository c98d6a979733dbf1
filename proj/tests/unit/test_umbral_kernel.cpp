#include <random>

#include "doctest.h"
#include "polytrace/combinatorics.h"
#include "polytrace/error.h"
#include "polytrace/polynomial.h"

using namespace polytrace;

namespace {

using P = RationalPolynomial;

P poly(const Umbra& u) { return P(u); }
P poly(const Indeterminate& x) { return P(x); }
P constant(long num, long den = 1) { return P(ratio(num, den)); }

Rational value(const P& p) {
  const auto c = eval(p).as_constant();
  REQUIRE(c.has_value());
  return *c;
}

std::vector<Rational> first_moments(const Umbra& u, unsigned count) {
  std::vector<Rational> out;
  for (unsigned k = 0; k < count; ++k) out.push_back(u.moment(k));
  return out;
}

std::vector<Rational> seq(std::initializer_list<long> v) {
  std::vector<Rational> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

// Random polynomial in two fixed umbrae and two indeterminates.
P random_poly(std::mt19937_64& rng, const std::vector<P>& atoms) {
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(atoms.size()) - 1);
  std::uniform_int_distribution<int> len(1, 3);
  P out;
  for (int t = 0; t < 3; ++t) {
    P term = constant(coef(rng), 1 + (t % 2));
    for (int f = len(rng); f > 0; --f) term *= atoms[pick(rng)];
    out += term;
  }
  return out;
}

}  // namespace

TEST_CASE("special umbrae have the expected moments") {
  CHECK(first_moments(Umbra::singleton(), 5) == seq({1, 1, 0, 0, 0}));
  CHECK(first_moments(Umbra::delta(), 6) == seq({1, 0, 1, 0, 0, 0}));
  CHECK(first_moments(Umbra::unity(), 4) == seq({1, 1, 1, 1}));
  CHECK(first_moments(Umbra::gaussian(0, 1), 9) == seq({1, 0, 1, 0, 3, 0, 15, 0, 105}));
  CHECK(first_moments(Umbra::falling(3), 6) == seq({1, 3, 6, 6, 0, 0}));
  // N(2, 9): E X^2 = 13, E X^3 = 8 + 3*2*9 = 62.
  CHECK(first_moments(Umbra::gaussian(2, 9), 4) == seq({1, 2, 13, 62}));
  const auto custom = Umbra::custom([](unsigned k) { return Rational(k + 7); }, std::nullopt, "alpha");
  CHECK(custom.moment(0) == 1);
  CHECK(custom.moment(3) == 10);
  CHECK(custom.kind() == UmbraKind::custom);
}

TEST_CASE("vanishing orders") {
  CHECK(Umbra::singleton().vanishing_order() == 2u);
  CHECK(Umbra::delta().vanishing_order() == 3u);
  CHECK(Umbra::falling(4).vanishing_order() == 5u);
  CHECK_FALSE(Umbra::unity().vanishing_order().has_value());
  CHECK_FALSE(Umbra::gaussian(0, 1).vanishing_order().has_value());
}

TEST_CASE("families are distinct umbrae") {
  const auto chis = make_singleton_family(3, "chi");
  REQUIRE(chis.size() == 3);
  CHECK(chis[0] != chis[1]);
  CHECK(chis[1].name() == "chi_2");
  CHECK(Umbra::from_id(chis[2].id()) == chis[2]);
  CHECK(Umbra::singleton() != Umbra::singleton());
}

TEST_CASE("indeterminates are interned by name") {
  CHECK(Indeterminate("y_1") == Indeterminate("y_1"));
  CHECK(Indeterminate("y_1") != Indeterminate("y_2"));
  const auto fam = Indeterminate::family("w", 3);
  CHECK(fam[2].name() == "w_3");
  CHECK(Indeterminate::from_id(fam[0].id()).name() == "w_1");
}

TEST_CASE("evaluation examples") {
  const auto chi = make_singleton_family(2);
  const auto y = Indeterminate::family("y", 2);
  CHECK(value(poly(chi[0]) * poly(chi[1])) == 1);
  CHECK(value(poly(chi[0]) * poly(chi[0])) == 0);
  const P lin = poly(chi[0]) * poly(y[0]) + poly(chi[1]) * poly(y[1]);
  CHECK(eval(lin * lin) == (poly(y[0]) * poly(y[1])).scaled(Rational(2)));
  CHECK(eval(poly(chi[0]) * poly(y[0]) * poly(chi[0]) * poly(y[1])).is_zero());
  const auto deltas = make_delta_family(2);
  CHECK(value(pow(poly(deltas[0]), 2) * pow(poly(deltas[1]), 2)) == 1);
  CHECK(value(pow(poly(deltas[0]), 4)) == 0);
}

TEST_CASE("powers of the same umbra accumulate") {
  const auto u = Umbra::gaussian(0, 1);
  const P p = poly(u) * poly(u);
  REQUIRE(p.size() == 1);
  CHECK(p.terms().begin()->first.umbrae.front().exponent == 2);
  CHECK(value(p * p) == 3);
  CHECK(pow(p, 0) == constant(1));
}

TEST_CASE("generating function coefficients") {
  auto gf = [](const Umbra& u, unsigned order) {
    std::vector<Rational> out;
    for (const auto& c : gf_coefficients(P(u), order)) out.push_back(*c.as_constant());
    return out;
  };
  CHECK(gf(Umbra::delta(), 3) == std::vector<Rational>{1, 0, ratio(1, 2), 0});
  CHECK(gf(Umbra::gaussian(0, 1), 4) == std::vector<Rational>{1, 0, ratio(1, 2), 0, ratio(1, 8)});
  CHECK(gf(Umbra::unity(), 2) == std::vector<Rational>{1, 1, ratio(1, 2)});
}

TEST_CASE("similarity") {
  const auto d = Umbra::delta();
  CHECK(similar(poly(d) * poly(d), poly(Umbra::singleton()), 6));
  const auto chi = make_singleton_family(2);
  CHECK(similar(poly(chi[0]) + poly(chi[1]), poly(Umbra::falling(2)), 4));
  CHECK_FALSE(similar(poly(Umbra::delta()), poly(Umbra::singleton()), 2));
  CHECK_THROWS_AS(similar(poly(d), poly(d), 0), Error);
}

TEST_CASE("falling factorial umbra matches a sum of singletons") {
  const auto chi = make_singleton_family(3);
  const P sum = poly(chi[0]) + poly(chi[1]) + poly(chi[2]);
  for (unsigned k = 0; k <= 5; ++k) CHECK(value(pow(sum, k)) == Rational(falling_factorial(3, k)));
}

TEST_CASE("substitution") {
  const auto y = Indeterminate::family("y", 2);
  const auto deltas = make_delta_family(2);
  const P s = poly(y[0]) * poly(y[0]) + poly(y[1]) * poly(y[1]);
  std::unordered_map<SymbolId, P> repl{{y[0].id(), poly(deltas[0])}, {y[1].id(), poly(deltas[1])}};
  CHECK(value(substitute(s, repl)) == 2);
  CHECK(substitute(s, y[0], constant(3)) == constant(9) + poly(y[1]) * poly(y[1]));
  const Indeterminate z("z");
  CHECK(substitute(s, y[1], poly(z)) == poly(y[0]) * poly(y[0]) + poly(z) * poly(z));
}

TEST_CASE("pruning keeps evaluations") {
  const auto chi = make_singleton_family(2);
  const auto deltas = make_delta_family(2);
  const auto y = Indeterminate::family("y", 2);
  const P a = poly(chi[0]) * poly(y[0]) + poly(deltas[0]) * poly(deltas[0]) + poly(chi[1]);
  const P b = poly(chi[0]) + poly(deltas[0]) * poly(y[1]) + constant(2);
  const P c = poly(chi[1]) * poly(deltas[1]) * poly(deltas[1]) + poly(y[0]);
  CHECK(prune(a * b) == mul_pruned(a, b));
  CHECK(eval(mul_pruned(a, b) * c) == eval(a * b * c));
  CHECK(prune(poly(chi[0]) * poly(chi[0])).is_zero());
  CHECK(prune(pow(poly(deltas[0]), 3)).is_zero());
  CHECK_FALSE(prune(pow(poly(deltas[0]), 2)).is_zero());
}

TEST_CASE("e.s.f. umbra law") {
  for (unsigned p = 1; p <= 5; ++p) {
    const auto chi = make_singleton_family(p);
    const auto y = Indeterminate::family("y", p);
    std::vector<P> ys(y.begin(), y.end());
    P lin;
    for (unsigned j = 0; j < p; ++j) lin += poly(chi[j]) * ys[j];
    P power = constant(1);
    for (unsigned i = 1; i <= p + 1; ++i) {
      power *= lin;
      const P want = esf_direct<P>(ys, i).scaled(Rational(factorial(i)));
      CHECK(eval(power) == want);
    }
  }
}

TEST_CASE("u-statistics reduction") {
  const auto alpha = Umbra::gaussian(1, 2);
  for (unsigned p = 1; p <= 4; ++p) {
    const auto chi = make_singleton_family(p);
    P lin;
    for (unsigned j = 0; j < p; ++j) lin += poly(chi[j]) * poly(alpha);
    for (unsigned i = 0; i <= p; ++i)
      CHECK(value(pow(lin, i)) == alpha.moment(i) * Rational(falling_factorial(p, i)));
  }
}

TEST_CASE("linearity and uncorrelation") {
  std::mt19937_64 rng(5);
  const auto u1 = Umbra::gaussian(1, 3);
  const auto u2 = Umbra::falling(3);
  const auto u3 = Umbra::gaussian(-2, 1);
  const auto x = Indeterminate("x");
  const std::vector<P> left_atoms{poly(u1), poly(u2), poly(x)};
  const std::vector<P> right_atoms{poly(u3), poly(x), constant(1, 2)};
  for (int trial = 0; trial < 20; ++trial) {
    const P nu = random_poly(rng, left_atoms);
    const P mu = random_poly(rng, right_atoms);
    const Rational a = ratio(trial - 7, 3);
    const Rational b(2);
    CHECK(eval(nu.scaled(a) + mu.scaled(b)) == eval(nu).scaled(a) + eval(mu).scaled(b));
    for (unsigned i = 0; i <= 3; ++i)
      for (unsigned j = 0; i + j <= 6 && j <= 3; ++j)
        CHECK(eval(pow(nu, i) * pow(mu, j)) == eval(pow(nu, i)) * eval(pow(mu, j)));
  }
}

TEST_CASE("generating functions multiply for unrelated polynomials") {
  const P nu = poly(Umbra::gaussian(1, 2)) + poly(Umbra::singleton());
  const P mu = poly(Umbra::delta()).scaled(Rational(3));
  const unsigned order = 6;
  const auto f_nu = gf_coefficients(nu, order);
  const auto f_mu = gf_coefficients(mu, order);
  const auto f_sum = gf_coefficients(nu + mu, order);
  for (unsigned k = 0; k <= order; ++k) {
    P conv;
    for (unsigned j = 0; j <= k; ++j) conv += f_nu[j] * f_mu[k - j];
    CHECK(conv == f_sum[k]);
  }
}

TEST_CASE("multiplication is commutative and associative") {
  std::mt19937_64 rng(11);
  const auto chi = Umbra::singleton();
  const std::vector<P> atoms{poly(chi), poly(Umbra::unity()), poly(Indeterminate("a")), poly(Indeterminate("b"))};
  for (int trial = 0; trial < 30; ++trial) {
    const P a = random_poly(rng, atoms);
    const P b = random_poly(rng, atoms);
    const P c = random_poly(rng, atoms);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
  }
}

TEST_CASE("polynomial basics") {
  const Indeterminate y("y_1");
  const P p = constant(3, 2) * poly(y) * poly(y) - poly(Indeterminate("y_2")) + constant(1);
  CHECK(p.to_string() == "1 - y_2 + 3/2*y_1^2");
  CHECK(P().to_string() == "0");
  CHECK((p - p).is_zero());
  CHECK(p.as_constant() == std::nullopt);
  CHECK(constant(5).as_constant() == Rational(5));
  CHECK_FALSE(p.has_umbrae());
  CHECK((poly(Umbra::singleton()) * poly(y)).has_umbrae());
}

TEST_CASE("float polynomials evaluate the same way") {
  const auto g = Umbra::gaussian(0, 1);
  const FloatPolynomial q = FloatPolynomial(g) * FloatPolynomial(0.5) + FloatPolynomial(1.0);
  const auto e = eval(pow(q, 4)).as_constant();
  REQUIRE(e.has_value());
  // E(1 + z/2)^4 = 1 + 6/4 + 3/16.
  CHECK(*e == doctest::Approx(1.0 + 1.5 + 3.0 / 16.0));
}
