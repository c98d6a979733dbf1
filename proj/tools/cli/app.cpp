#include "cli/app.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "CLI11.hpp"
#include "cli/errors.h"
#include "cli/matrix_io.h"
#include "cli/selftest.h"
#include "polytrace/error.h"
#include "polytrace/oracles.h"

namespace polytrace::cli {

using nlohmann::ordered_json;

namespace {

constexpr double kRelativeTolerance = 1e-8;
constexpr double kStderrMultiple = 4.0;

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format_double(double v) { return ScalarTraits<double>::to_string(v); }

unsigned parse_unsigned(const std::string& text) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw UsageError("bad order '" + text + "'");
  try {
    return static_cast<unsigned>(std::stoul(text));
  } catch (const std::exception&) {
    throw UsageError("bad order '" + text + "'");
  }
}

template <Scalar S>
ordered_json matrix_json(const Matrix<S>& a) {
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if constexpr (ScalarTraits<S>::exact)
        row.push_back(a(r, c).get_str());
      else
        row.push_back(a(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json params_echo(const Problem& problem, bool with_sampling) {
  const auto& cfg = problem.config;
  ordered_json echo;
  echo["n"] = problem.exact.n;
  echo["p"] = problem.exact.p();
  if (cfg.mode == Mode::rational) {
    echo["sigma"] = matrix_json(problem.exact.sigma);
    echo["m"] = problem.has_mean ? matrix_json(problem.exact.mean) : ordered_json(nullptr);
  } else {
    echo["sigma"] = matrix_json(problem.floating.sigma);
    echo["m"] = problem.has_mean ? matrix_json(problem.floating.mean) : ordered_json(nullptr);
  }
  if (with_sampling) {
    echo["samples"] = cfg.samples;
    echo["seed"] = cfg.seed;
  }
  return echo;
}

ordered_json value_json(const MethodValue& v, const Problem& problem, bool with_echo) {
  ordered_json rec;
  rec["method"] = to_string(v.method);
  rec["i"] = v.i;
  rec["value"] = v.value;
  if (v.exact) rec["exact"] = *v.exact;
  if (v.std_error) rec["stderr"] = *v.std_error;
  if (v.regime) rec["regime"] = *v.regime;
  if (with_echo) rec["params_echo"] = params_echo(problem, v.method == Method::mc);
  rec["mode"] = to_string(problem.config.mode);
  if (problem.config.timing) rec["timing_ms"] = v.timing_ms;
  return rec;
}

std::string optional_cell(const std::optional<std::string>& v) { return v ? *v : std::string(); }
std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<unsigned> orders_for(const Problem& problem, bool include_zero) {
  OrderRange range{include_zero ? 0u : 1u, problem.exact.p()};
  if (!problem.config.i_spec.empty()) range = parse_order_range(problem.config.i_spec);
  std::vector<unsigned> out;
  for (unsigned i = range.first; i <= range.last; ++i) out.push_back(i);
  return out;
}

struct Comparison {
  Method reference = Method::closed_form;
  double abs_dev = 0.0;
  double rel_dev = 0.0;
  double tolerance = 0.0;
  std::string criterion;
  bool pass = false;
  bool statistical = false;
};

Comparison compare_values(const MethodValue& ref, const MethodValue& other, Mode mode) {
  Comparison c;
  c.reference = ref.method;
  c.abs_dev = std::abs(ref.value - other.value);
  const double scale = std::max(std::abs(ref.value), std::abs(other.value));
  c.rel_dev = scale > 0.0 ? c.abs_dev / scale : 0.0;
  if (ref.std_error || other.std_error) {
    const double se_a = ref.std_error.value_or(0.0);
    const double se_b = other.std_error.value_or(0.0);
    c.criterion = "stderr";
    c.tolerance = kStderrMultiple * std::sqrt(se_a * se_a + se_b * se_b);
    c.pass = c.abs_dev <= c.tolerance;
    c.statistical = true;
  } else if (mode == Mode::rational && ref.exact && other.exact) {
    c.criterion = "exact";
    c.pass = *ref.exact == *other.exact;
  } else {
    c.criterion = "relative";
    c.tolerance = kRelativeTolerance;
    c.pass = c.rel_dev <= kRelativeTolerance;
  }
  return c;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out_path.empty())
    out << text;
  else
    write_text_file_atomic(cfg.out_path, text);
}

int run_compute(const RunConfig& cfg, std::ostream& out) {
  const Problem problem = load_problem(cfg);
  const auto values = evaluate(problem, cfg.methods.front(), orders_for(problem, false));
  std::string text;
  if (cfg.output == "csv") {
    text = "method,i,value,exact,stderr,regime,mode";
    if (cfg.timing) text += ",timing_ms";
    text += "\n";
    for (const auto& v : values) {
      text += std::string(to_string(v.method)) + "," + std::to_string(v.i) + "," + format_double(v.value) + "," +
              optional_cell(v.exact) + "," + optional_cell(v.std_error) + "," + optional_cell(v.regime) + "," +
              to_string(cfg.mode);
      if (cfg.timing) text += "," + format_double(v.timing_ms);
      text += "\n";
    }
  } else {
    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "compute";
    auto& results = doc["results"] = ordered_json::array();
    for (const auto& v : values) results.push_back(value_json(v, problem, true));
    text = doc.dump(2) + "\n";
  }
  emit(cfg, text, out);
  return kExitPass;
}

int run_compare(const RunConfig& cfg, std::ostream& out) {
  if (cfg.methods.size() < 2) throw UsageError("compare needs at least two methods");
  const Problem problem = load_problem(cfg);
  const auto orders = orders_for(problem, false);
  std::vector<std::vector<MethodValue>> by_method;
  for (auto m : cfg.methods) by_method.push_back(evaluate(problem, m, orders));

  bool numerical_fail = false;
  bool statistical_fail = false;
  ordered_json doc;
  doc["schema"] = 1;
  doc["command"] = "compare";
  doc["mode"] = to_string(cfg.mode);
  doc["methods"] = ordered_json::array();
  for (auto m : cfg.methods) doc["methods"].push_back(to_string(m));
  doc["params_echo"] = params_echo(problem, std::find(cfg.methods.begin(), cfg.methods.end(), Method::mc) !=
                                                cfg.methods.end());
  auto& results = doc["results"] = ordered_json::array();
  std::string csv = "i,method,value,exact,stderr,reference,abs_dev,rel_dev,criterion,pass\n";

  for (std::size_t k = 0; k < orders.size(); ++k) {
    ordered_json values = ordered_json::array();
    ordered_json comparisons = ordered_json::array();
    const MethodValue& ref = by_method.front()[k];
    for (std::size_t m = 0; m < by_method.size(); ++m) {
      const MethodValue& v = by_method[m][k];
      values.push_back(value_json(v, problem, false));
      std::string row = std::to_string(v.i) + "," + to_string(v.method) + "," + format_double(v.value) + "," +
                        optional_cell(v.exact) + "," + optional_cell(v.std_error) + ",";
      if (m == 0) {
        csv += row + ",,,,\n";
        continue;
      }
      const Comparison c = compare_values(ref, v, cfg.mode);
      if (!c.pass) (c.statistical ? statistical_fail : numerical_fail) = true;
      ordered_json cj;
      cj["methods"] = ordered_json::array({to_string(ref.method), to_string(v.method)});
      cj["abs_dev"] = c.abs_dev;
      cj["rel_dev"] = c.rel_dev;
      cj["criterion"] = c.criterion;
      cj["tolerance"] = c.tolerance;
      cj["pass"] = c.pass;
      comparisons.push_back(std::move(cj));
      csv += row + to_string(ref.method) + "," + format_double(c.abs_dev) + "," + format_double(c.rel_dev) + "," +
             c.criterion + "," + (c.pass ? "true" : "false") + "\n";
    }
    ordered_json entry;
    entry["i"] = orders[k];
    entry["values"] = std::move(values);
    entry["comparisons"] = std::move(comparisons);
    results.push_back(std::move(entry));
  }
  doc["pass"] = !numerical_fail && !statistical_fail;
  emit(cfg, cfg.output == "csv" ? csv : doc.dump(2) + "\n", out);
  if (numerical_fail) return kExitNumerical;
  if (statistical_fail) return kExitStatistical;
  return kExitPass;
}

int run_table(const RunConfig& cfg, std::ostream& out) {
  const Problem problem = load_problem(cfg);
  const auto orders = orders_for(problem, true);
  std::vector<std::vector<MethodValue>> by_method;
  for (auto m : cfg.methods) by_method.push_back(evaluate(problem, m, orders));

  std::string text;
  if (cfg.output == "csv") {
    text = "i";
    for (auto m : cfg.methods) text += std::string(",") + to_string(m);
    text += "\n";
    for (std::size_t k = 0; k < orders.size(); ++k) {
      text += std::to_string(orders[k]);
      for (const auto& col : by_method) text += "," + (col[k].exact ? *col[k].exact : format_double(col[k].value));
      text += "\n";
    }
  } else {
    ordered_json doc;
    doc["schema"] = 1;
    doc["command"] = "table";
    doc["mode"] = to_string(cfg.mode);
    doc["params_echo"] = params_echo(problem, std::find(cfg.methods.begin(), cfg.methods.end(), Method::mc) !=
                                                  cfg.methods.end());
    auto& rows = doc["rows"] = ordered_json::array();
    for (std::size_t k = 0; k < orders.size(); ++k) {
      ordered_json row;
      row["i"] = orders[k];
      auto& values = row["values"] = ordered_json::array();
      for (const auto& col : by_method) values.push_back(value_json(col[k], problem, false));
      rows.push_back(std::move(row));
    }
    text = doc.dump(2) + "\n";
  }
  emit(cfg, text, out);
  return kExitPass;
}

int run_selftest_command(const RunConfig& cfg, std::ostream& out) {
  const auto records = run_selftest(cfg.filter);
  if (records.empty()) throw UsageError("no selftest matches '" + cfg.filter + "'");
  emit(cfg, cfg.json ? selftest_json(records).dump(2) + "\n" : format_selftest_table(records), out);
  return selftest_exit_code(records);
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::closed_form: return "closed-form";
    case Method::umbral: return "umbral";
    case Method::wick: return "wick";
    case Method::mc: return "mc";
  }
  return "unknown";
}

const char* to_string(Mode mode) { return mode == Mode::rational ? "rational" : "float"; }

Method parse_method(const std::string& name) {
  if (name == "closed-form") return Method::closed_form;
  if (name == "umbral") return Method::umbral;
  if (name == "wick") return Method::wick;
  if (name == "mc") return Method::mc;
  throw UsageError("unknown method '" + name + "'");
}

OrderRange parse_order_range(const std::string& spec) {
  std::size_t sep = spec.find("..");
  std::size_t width = 2;
  if (sep == std::string::npos) {
    sep = spec.find(':');
    width = 1;
  }
  OrderRange out;
  if (sep == std::string::npos) {
    out.first = out.last = parse_unsigned(spec);
  } else {
    out.first = parse_unsigned(spec.substr(0, sep));
    out.last = parse_unsigned(spec.substr(sep + width));
  }
  if (out.last < out.first) throw UsageError("empty order range '" + spec + "'");
  return out;
}

Problem load_problem(const RunConfig& config) {
  Problem problem;
  problem.config = config;
  if (config.n == 0) throw UsageError("--n must be positive");

  Matrix<Rational> sigma;
  Matrix<double> sigma_f;
  if (!config.sigma_path.empty()) {
    const std::string text = read_text_file(config.sigma_path);
    sigma = parse_matrix_rational(text);
    sigma_f = config.mode == Mode::floating ? parse_matrix_double(text) : to_double(sigma);
  } else {
    if (config.p == 0) throw UsageError("either --p or --sigma is required");
    sigma = Matrix<Rational>::identity(config.p);
    sigma_f = Matrix<double>::identity(config.p);
  }
  if (config.p != 0 && sigma.rows() != config.p)
    throw UsageError("--p " + std::to_string(config.p) + " disagrees with the " + std::to_string(sigma.rows()) +
                     " rows of --sigma");
  const std::size_t p = sigma.rows();

  Matrix<Rational> mean(p, config.n);
  Matrix<double> mean_f(p, config.n);
  if (!config.m_path.empty()) {
    const std::string text = read_text_file(config.m_path);
    mean = parse_matrix_rational(text);
    mean_f = config.mode == Mode::floating ? parse_matrix_double(text) : to_double(mean);
    problem.has_mean = true;
  }

  problem.exact = {config.n, std::move(sigma), std::move(mean)};
  problem.floating = {config.n, std::move(sigma_f), std::move(mean_f)};
  problem.exact.validate();
  problem.floating.validate();
  return problem;
}

std::vector<MethodValue> evaluate(const Problem& problem, Method method, const std::vector<unsigned>& orders) {
  const bool rational = problem.config.mode == Mode::rational;
  std::vector<MethodValue> out;
  if (method == Method::mc) {
    if (orders.empty()) return out;
    const Stopwatch watch;
    const auto all = mc_estimate_all(problem.floating, *std::max_element(orders.begin(), orders.end()),
                                     problem.config.samples, problem.config.seed);
    const double ms = watch.elapsed_ms();
    for (unsigned i : orders) {
      MethodValue v;
      v.method = method;
      v.i = i;
      v.value = all[i].value;
      v.std_error = all[i].std_error;
      v.timing_ms = ms;
      out.push_back(v);
    }
    return out;
  }

  for (unsigned i : orders) {
    MethodValue v;
    v.method = method;
    v.i = i;
    const Stopwatch watch;
    switch (method) {
      case Method::closed_form:
        if (rational) {
          const Rational r = esf_expectation_closed_form(problem.exact, i);
          v.value = r.get_d();
          v.exact = r.get_str();
        } else {
          v.value = esf_expectation_closed_form(problem.floating, i);
        }
        break;
      case Method::umbral: {
        const EsfValue e =
            rational ? esf_expectation_umbral(problem.exact, i) : esf_expectation_umbral(problem.floating, i);
        v.value = e.value;
        if (e.exact) v.exact = e.exact->get_str();
        v.regime = polytrace::to_string(e.regime);
        break;
      }
      case Method::wick: {
        const Rational r = wick_expectation(problem.exact, i);
        v.value = r.get_d();
        if (rational) v.exact = r.get_str();
        break;
      }
      case Method::mc:
        break;
    }
    v.timing_ms = watch.elapsed_ms();
    out.push_back(v);
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected elementary symmetric functions of non-central Wishart latent roots", "polytrace"};
  app.require_subcommand(1, 1);

  RunConfig cfg;
  std::string mode = "rational";
  std::string method = "closed-form";
  std::vector<std::string> methods;
  bool no_timing = false;

  auto add_problem_options = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "Degrees of freedom")->required();
    sub->add_option("--p", cfg.p, "Dimension (defaults to the rows of --sigma)");
    sub->add_option("--sigma", cfg.sigma_path, "CSV file with Sigma (default: identity)");
    sub->add_option("--m", cfg.m_path, "CSV file with the p x n mean (default: zero)");
    sub->add_option("--i", cfg.i_spec, "Order k or range a..b");
    sub->add_option("--samples", cfg.samples, "Monte Carlo sample count")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
    sub->add_option("--mode", mode, "Arithmetic")->check(CLI::IsMember({"rational", "float"}))->capture_default_str();
    sub->add_option("--output", cfg.output, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sub->add_option("--out", cfg.out_path, "Write the report to this file");
    sub->add_flag("--no-timing", no_timing, "Leave timing_ms out of the report");
  };
  const std::vector<std::string> method_names{"closed-form", "umbral", "wick", "mc"};

  auto* compute = app.add_subcommand("compute", "E[Tr_i(W)] by one method");
  add_problem_options(compute);
  compute->add_option("--method", method, "closed-form, umbral, wick or mc")
      ->check(CLI::IsMember(method_names))
      ->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Compare methods order by order");
  add_problem_options(compare);
  compare->add_option("--methods", methods, "Comma-separated methods, the first is the reference")
      ->delimiter(',')
      ->required()
      ->check(CLI::IsMember(method_names));

  auto* table = app.add_subcommand("table", "Values of several methods for every order");
  add_problem_options(table);
  table->add_option("--methods", methods, "Comma-separated methods (default: closed-form,umbral)")
      ->delimiter(',')
      ->check(CLI::IsMember(method_names));

  auto* selftest = app.add_subcommand("selftest", "Run the embedded acceptance suite");
  selftest->add_option("--filter", cfg.filter, "Only cases whose name contains this text");
  selftest->add_flag("--json", cfg.json, "Machine-readable results");
  selftest->add_option("--out", cfg.out_path, "Write the report to this file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    cfg.mode = mode == "float" ? Mode::floating : Mode::rational;
    cfg.timing = !no_timing;
    if (app.got_subcommand(compute)) {
      cfg.command = "compute";
      cfg.methods = {parse_method(method)};
      return run_compute(cfg, out);
    }
    if (app.got_subcommand(compare)) {
      cfg.command = "compare";
      for (const auto& m : methods) cfg.methods.push_back(parse_method(m));
      return run_compare(cfg, out);
    }
    if (app.got_subcommand(table)) {
      cfg.command = "table";
      if (methods.empty()) methods = {"closed-form", "umbral"};
      for (const auto& m : methods) cfg.methods.push_back(parse_method(m));
      return run_table(cfg, out);
    }
    cfg.command = "selftest";
    return run_selftest_command(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace polytrace::cli
