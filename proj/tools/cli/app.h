#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "polytrace/wishart.h"

namespace polytrace::cli {

enum class Method { closed_form, umbral, wick, mc };
enum class Mode { rational, floating };

const char* to_string(Method method);
const char* to_string(Mode mode);
/// Throws UsageError for unknown names.
Method parse_method(const std::string& name);

struct RunConfig {
  std::string command;
  unsigned n = 0;
  unsigned p = 0;
  std::string sigma_path;
  std::string m_path;
  std::string i_spec;  // "k", "a..b" or "a:b"; empty for the default range
  std::vector<Method> methods;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  Mode mode = Mode::rational;
  std::string output = "json";
  std::string out_path;
  bool timing = true;
  std::string filter;
  bool json = false;
};

/// Inclusive range of e.s.f. orders.
struct OrderRange {
  unsigned first = 0;
  unsigned last = 0;
};

/// Throws UsageError on malformed input or last < first.
OrderRange parse_order_range(const std::string& spec);

/// Parameters loaded from a RunConfig: exact values always, and a float
/// copy parsed with correct rounding in float mode.
struct Problem {
  RunConfig config;
  WishartParams<Rational> exact;
  WishartParams<double> floating;
  bool has_mean = false;
};

/// Reads the CSV inputs; an absent --sigma means the p x p identity and an
/// absent --m the zero mean. Throws UsageError for IO / parse problems and
/// polytrace::Error for invariant violations.
Problem load_problem(const RunConfig& config);

struct MethodValue {
  Method method = Method::closed_form;
  unsigned i = 0;
  double value = 0.0;
  std::optional<std::string> exact;
  std::optional<double> std_error;
  std::optional<std::string> regime;
  double timing_ms = 0.0;
};

/// Values of one method for every order in `orders`.
std::vector<MethodValue> evaluate(const Problem& problem, Method method, const std::vector<unsigned>& orders);

/// Runs the command line (without the program name) and returns the exit
/// code: 0 pass, 1 usage / IO error, 2 numerical or invariant failure,
/// 3 statistical tolerance failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polytrace::cli
