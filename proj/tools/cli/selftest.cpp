#include "cli/selftest.h"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "cli/errors.h"
#include "cli/random_instances.h"
#include "polytrace/combinatorics.h"
#include "polytrace/oracles.h"
#include "polytrace/wishart.h"

namespace polytrace::cli {

namespace {

constexpr double kRelativeTolerance = 1e-8;
constexpr double kStderrMultiple = 4.0;

// Counts cases and keeps the first failure message.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    ++cases_;
    if (!ok) {
      ++failures_;
      if (first_failure_.empty()) first_failure_ = what;
    }
  }

  CheckResult result(const std::string& summary) const {
    CheckResult out;
    out.pass = failures_ == 0;
    out.cases = cases_;
    out.detail = out.pass ? summary : std::to_string(failures_) + " of " + std::to_string(cases_) +
                                          " failed; first: " + first_failure_;
    return out;
  }

 private:
  std::size_t cases_ = 0;
  std::size_t failures_ = 0;
  std::string first_failure_;
};

bool close_relative(double a, double b, double tol = kRelativeTolerance) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= tol * scale;
}

std::string describe(unsigned p, unsigned n, unsigned i) {
  return "p=" + std::to_string(p) + " n=" + std::to_string(n) + " i=" + std::to_string(i);
}

Rational rational_of(const Integer& v) { return Rational(v); }

CheckResult falling_factorial_identity() {
  Tally tally;
  for (unsigned p = 1; p <= 4; ++p)
    for (unsigned n = 4; n <= 6; ++n) {
      const auto params = WishartParams<Rational>::make(n, Matrix<Rational>::identity(p));
      for (unsigned i = 1; i <= p; ++i) {
        const auto got = esf_expectation_umbral(params, i);
        const Rational want = ratio(falling_factorial(n, i) * falling_factorial(p, i), factorial(i));
        tally.check(got.exact && *got.exact == want,
                    describe(p, n, i) + " got " + (got.exact ? got.exact->get_str() : "inexact") + " want " +
                        want.get_str());
      }
    }
  return tally.result("umbral route equals (n)_i (p)_i / i! exactly");
}

CheckResult central_case() {
  Tally tally;
  RationalSource src(20240601);
  for (unsigned trial = 0; trial < 30; ++trial) {
    const unsigned p = static_cast<unsigned>(src.integer(1, 4));
    const unsigned n = p + static_cast<unsigned>(src.integer(0, 2));
    const auto sigma = trial < 20 ? src.diagonal_spd(p) : src.spd(p);
    const auto params = WishartParams<Rational>::make(n, sigma);
    for (unsigned i = 1; i <= p; ++i) {
      const Rational want = rational_of(falling_factorial(n, i)) * principal_minor_sum(sigma, i);
      const auto umbral = esf_expectation_umbral(params, i);
      const Rational closed = esf_expectation_closed_form(params, i);
      tally.check(umbral.exact && *umbral.exact == want && closed == want,
                  describe(p, n, i) + (trial < 20 ? " diagonal" : " full") + " sigma, want " + want.get_str());
    }
  }
  return tally.result("umbral and closed form equal (n)_i Tr_i(Sigma) exactly");
}

CheckResult scaled_identity_case() {
  Tally tally;
  RationalSource src(20240602);
  const Rational scales[] = {Rational(1), Rational(1, 4), Rational(9)};
  for (const auto& s2 : scales)
    for (unsigned p = 1; p <= 3; ++p)
      for (unsigned n = p; n <= 5; ++n) {
        const auto sigma = scale(s2, Matrix<Rational>::identity(p));
        const auto diag_params = WishartParams<Rational>::make(n, sigma, src.rect_diagonal(p, n));
        const auto dense_params = WishartParams<Rational>::make(n, sigma, src.dense(p, n));
        for (unsigned i = 1; i <= p; ++i) {
          const auto exact = esf_expectation_umbral(diag_params, i);
          const Rational closed = closed_form_scaled_identity(diag_params, i);
          tally.check(exact.regime == Regime::scaled_identity && exact.exact && *exact.exact == closed,
                      describe(p, n, i) + " sigma^2=" + s2.get_str() + " diagonal M");
          const auto svd_route = esf_expectation_umbral(dense_params, i);
          const double dense_closed = closed_form_scaled_identity(dense_params, i).get_d();
          tally.check(svd_route.regime == Regime::scaled_identity && close_relative(svd_route.value, dense_closed),
                      describe(p, n, i) + " sigma^2=" + s2.get_str() + " dense M");
        }
      }
  return tally.result("exact with diagonal M, within 1e-8 relative with dense M");
}

CheckResult full_rank_case() {
  Tally tally;
  RationalSource src(20240603);
  for (unsigned p = 1; p <= 3; ++p)
    for (unsigned trial = 0; trial < 8; ++trial) {
      const unsigned n = p + static_cast<unsigned>(src.integer(0, 2));
      const auto params = WishartParams<Rational>::make(n, src.spd(p), src.dense(p, n));
      const auto umbral = esf_expectation_umbral(params, p);
      const double closed = closed_form_full_rank(params).get_d();
      const bool regime_ok = umbral.regime == Regime::full_rank || umbral.regime == Regime::scaled_identity;
      tally.check(regime_ok && close_relative(umbral.value, closed),
                  describe(p, n, p) + " umbral " + std::to_string(umbral.value) + " closed " + std::to_string(closed));
    }
  return tally.result("det(Sigma)-weighted umbral route within 1e-8 relative of the closed form");
}

CheckResult general_vs_wick() {
  Tally tally;
  RationalSource src(20240604);
  for (unsigned p = 1; p <= 2; ++p)
    for (unsigned n = p; n <= 3; ++n)
      for (unsigned trial = 0; trial < 3; ++trial) {
        const auto params = WishartParams<Rational>::make(n, src.diagonal_spd(p), src.dense(p, n));
        for (unsigned i = 1; i <= std::min(p, 2u); ++i) {
          const Rational general = closed_form_general(params, i);
          const Rational wick = wick_expectation(params, i);
          tally.check(general == wick,
                      describe(p, n, i) + " general " + general.get_str() + " wick " + wick.get_str());
        }
      }
  return tally.result("general formula equals the Wick expansion exactly");
}

CheckResult dewaal() {
  Tally tally;
  RationalSource src(20240605);
  for (unsigned p = 1; p <= 4; ++p)
    for (unsigned n = 1; n <= 5; ++n)
      for (unsigned trial = 0; trial < 10; ++trial) {
        const auto m = src.vector(p);
        for (unsigned i = 0; i <= std::min(p, n); ++i)
          for (unsigned j = 0; j <= i; ++j) {
            const auto check = desf_conjecture_identity(p, n, i, j, m);
            tally.check(check.kernel == check.reference,
                        describe(p, n, i) + " j=" + std::to_string(j) + " kernel " + check.kernel.get_str() +
                            " reference " + check.reference.get_str());
          }
      }
  return tally.result("kernel equals C(n-j,i-j) C(p-j,i-j) e_j(m^2) exactly");
}

CheckResult worked_example_c1() {
  Tally tally;
  const auto theta = Indeterminate::family("theta", 2);
  const auto y = Indeterminate::family("y", 2);
  const auto x = Indeterminate::family("x", 3);
  std::vector<RationalPolynomial> theta_polys(theta.begin(), theta.end());
  const auto sigma = UmbralMatrix<Rational>::diagonal(theta_polys);
  const auto mean = symbolic_matrix<Rational>("m", 2, 3);
  const auto model = TraceModel<Rational>::symbolic(sigma, mean, "y", "x");
  const RationalPolynomial c1 = cumulant(model, 1);

  auto sq = [](const Indeterminate& v) { return RationalPolynomial(v) * RationalPolynomial(v); };
  auto m = [](unsigned a, unsigned j) {
    const Indeterminate v("m_" + std::to_string(a) + std::to_string(j));
    return RationalPolynomial(v) * RationalPolynomial(v);
  };
  const RationalPolynomial printed =
      (sq(x[0]) * sq(y[0]) + sq(x[1]) * sq(y[0]) + sq(x[2]) * sq(y[0])) * RationalPolynomial(theta[0]) +
      (sq(x[0]) * sq(y[1]) + sq(x[1]) * sq(y[1]) + sq(x[2]) * sq(y[1])) * RationalPolynomial(theta[1]) +
      sq(y[0]) * (m(1, 1) * sq(x[0]) + m(1, 2) * sq(x[1]) + m(1, 3) * sq(x[2])) +
      sq(y[1]) * (m(2, 1) * sq(x[0]) + m(2, 2) * sq(x[1]) + m(2, 3) * sq(x[2]));

  tally.check(printed.size() == 12, "printed polynomial should have 12 terms");
  tally.check(c1 == printed, "c_1 = " + c1.to_string());
  for (const auto& [key, coeff] : printed.terms())
    tally.check(c1.coefficient(key) == coeff, "coefficient mismatch");
  return tally.result("c_1 matches the printed polynomial term for term");
}

CheckResult trace_moment_vs_wick() {
  Tally tally;
  RationalSource src(20240607);
  for (unsigned trial = 0; trial < 6; ++trial) {
    const auto sigma = trial % 2 == 0 ? src.spd(2) : src.diagonal_spd(2);
    const auto mean = trial < 2 ? Matrix<Rational>(2, 2) : src.dense(2, 2);
    const auto params = WishartParams<Rational>::make(2, sigma, mean);
    const auto y = src.vector(2);
    const auto x = src.vector(2);
    TraceModel<Rational> model{lift(sigma), lift(mean), {}, {}};
    for (const auto& v : y) model.y.emplace_back(v);
    for (const auto& v : x) model.x.emplace_back(v);
    for (unsigned i = 1; i <= 2; ++i) {
      const auto moment = trace_moment(model, i).as_constant();
      const Rational wick = wick_trace_moment(params, i, y, x);
      tally.check(moment && *moment == wick, "trial " + std::to_string(trial) + " i=" + std::to_string(i) +
                                                 " bell " + (moment ? moment->get_str() : "non-constant") +
                                                 " wick " + wick.get_str());
    }
  }
  return tally.result("B_i(c_1..c_i) at numeric (y, x) equals the Wick expansion exactly");
}

CheckResult chisq_cumulants() {
  Tally tally;
  RationalSource src(20240608);
  constexpr unsigned kOrder = 4;
  for (unsigned p = 1; p <= 3; ++p) {
    const auto sigma = src.spd(p);
    const auto m = src.vector(p);
    std::vector<Rational> want;
    for (unsigned k = 1; k <= kOrder; ++k) want.push_back(noncentral_chisq_cumulant<Rational>(sigma, m, k));

    const auto q = quadratic_form_umbra(sigma, m);
    std::vector<Rational> moments;
    RationalPolynomial power(Rational(1));
    for (unsigned k = 1; k <= kOrder; ++k) {
      power *= q;
      moments.push_back(*eval(power).as_constant());
    }
    const auto bell = cumulants_from_moments<Rational>(moments);
    for (unsigned k = 0; k < kOrder; ++k)
      tally.check(bell[k] == want[k], "p=" + std::to_string(p) + " k=" + std::to_string(k + 1) + " umbral " +
                                          bell[k].get_str() + " formula " + want[k].get_str());

    std::vector<double> md;
    for (const auto& v : m) md.push_back(v.get_d());
    const auto mc = mc_quadratic_form_cumulants(to_double(sigma), md, kOrder, 1000000, 9000 + p);
    for (unsigned k = 0; k < kOrder; ++k) {
      const double dev = std::abs(mc[k].value - want[k].get_d());
      tally.check(dev <= kStderrMultiple * mc[k].std_error,
                  "p=" + std::to_string(p) + " k=" + std::to_string(k + 1) + " monte carlo off by " +
                      std::to_string(dev / mc[k].std_error) + " stderr");
    }
  }
  return tally.result("formula matches the umbral Bell map exactly and Monte Carlo within 4 stderr");
}

CheckResult combinatorial_core() {
  Tally tally;
  RationalSource src(20240610);
  for (unsigned trial = 0; trial < 100; ++trial) {
    const auto y = src.vector(static_cast<std::size_t>(src.integer(1, 6)));
    const std::span<const Rational> ys(y);
    for (unsigned i = 0; i <= 6; ++i) {
      const Rational direct = esf_direct(ys, i);
      tally.check(direct == esf_via_bell(ys, i) && direct == esf_via_cycle_classes(ys, i),
                  "trial " + std::to_string(trial) + " i=" + std::to_string(i));
    }
  }
  for (unsigned i = 0; i <= 8; ++i) {
    Integer total_s = 0;
    for (const auto& lambda : enumerate_partitions(i)) {
      total_s += s_lambda(lambda);
      Integer linked = d_lambda(lambda);
      for (const auto& b : lambda.blocks())
        for (unsigned r = 0; r < b.multiplicity; ++r) linked *= factorial(b.part - 1);
      tally.check(linked == s_lambda(lambda), "d/s link for " + lambda.to_string());
    }
    tally.check(total_s == factorial(i), "sum of s_lambda for i=" + std::to_string(i));
  }
  return tally.result("three e.s.f. routes agree; partition identities hold");
}

CheckResult mc_calibration() {
  Tally tally;
  constexpr unsigned kSeeds = 100;
  constexpr unsigned kRequired = 96;
  constexpr std::uint64_t kSamples = 100000;
  for (unsigned p = 1; p <= 4; ++p)
    for (unsigned n = 4; n <= 6; ++n) {
      const auto params = WishartParams<double>::make(n, Matrix<double>::identity(p));
      std::vector<unsigned> hits(p + 1, 0);
      for (unsigned seed = 1; seed <= kSeeds; ++seed) {
        const auto estimates = mc_estimate_all(params, p, kSamples, seed);
        for (unsigned i = 1; i <= p; ++i) {
          const double exact =
              ratio(falling_factorial(n, i) * falling_factorial(p, i), factorial(i)).get_d();
          if (std::abs(estimates[i].value - exact) <= kStderrMultiple * estimates[i].std_error) ++hits[i];
        }
      }
      for (unsigned i = 1; i <= p; ++i)
        tally.check(hits[i] >= kRequired,
                    describe(p, n, i) + " " + std::to_string(hits[i]) + "/" + std::to_string(kSeeds) + " covered");
    }
  return tally.result("at least 96 of 100 seeds within 4 stderr on every instance");
}

}  // namespace

const std::vector<SelfTestCase>& selftest_cases() {
  static const std::vector<SelfTestCase> cases = {
      {"falling_factorial_identity", "E[Tr_i(W)] = (n)_i (p)_i / i! for Sigma = I, M = 0", false, falling_factorial_identity},
      {"central_case", "central case (n)_i Tr_i(Sigma)", false, central_case},
      {"scaled_identity_case", "Sigma = sigma^2 I case", false, scaled_identity_case},
      {"full_rank_case", "i = p case", false, full_rank_case},
      {"general_vs_wick", "general formula against Wick", false, general_vs_wick},
      {"dewaal", "double-singleton identity", false, dewaal},
      {"worked_example_c1", "symbolic c_1 for n = 3, p = 2", false, worked_example_c1},
      {"trace_moment_vs_wick", "trace moments against Wick", false, trace_moment_vs_wick},
      {"chisq_cumulants", "non-central chi-square cumulants", true, chisq_cumulants},
      {"combinatorial_core", "e.s.f. routes and partition counts", false, combinatorial_core},
      {"mc_calibration", "Monte Carlo coverage", true, mc_calibration},
  };
  return cases;
}

std::vector<SelfTestRecord> run_selftest(const std::string& filter) {
  std::vector<SelfTestRecord> out;
  for (const auto& c : selftest_cases()) {
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    SelfTestRecord record{c.name, c.title, c.statistical, {}};
    try {
      record.result = c.run();
    } catch (const std::exception& e) {
      record.result = {false, 0, std::string("error: ") + e.what()};
    }
    out.push_back(std::move(record));
  }
  return out;
}

std::string format_selftest_table(const std::vector<SelfTestRecord>& records) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "name" << std::setw(8) << "result" << std::setw(8) << "cases"
     << "detail\n";
  for (const auto& r : records)
    os << std::left << std::setw(28) << r.name << std::setw(8) << (r.result.pass ? "PASS" : "FAIL")
       << std::setw(8) << r.result.cases << r.result.detail << "\n";
  std::size_t passed = 0;
  for (const auto& r : records) passed += r.result.pass ? 1 : 0;
  os << passed << "/" << records.size() << " passed\n";
  return os.str();
}

nlohmann::ordered_json selftest_json(const std::vector<SelfTestRecord>& records) {
  nlohmann::ordered_json out;
  out["schema"] = 1;
  out["command"] = "selftest";
  auto& results = out["results"] = nlohmann::ordered_json::array();
  bool all = true;
  for (const auto& r : records) {
    results.push_back({{"name", r.name},
                       {"title", r.title},
                       {"pass", r.result.pass},
                       {"cases", r.result.cases},
                       {"detail", r.result.detail}});
    all = all && r.result.pass;
  }
  out["pass"] = all;
  return out;
}

int selftest_exit_code(const std::vector<SelfTestRecord>& records) {
  bool numerical = false;
  bool statistical = false;
  for (const auto& r : records) {
    if (r.result.pass) continue;
    (r.statistical ? statistical : numerical) = true;
  }
  if (numerical) return kExitNumerical;
  if (statistical) return kExitStatistical;
  return kExitPass;
}

}  // namespace polytrace::cli
