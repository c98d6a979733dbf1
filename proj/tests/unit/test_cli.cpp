#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/app.h"
#include "cli/errors.h"
#include "cli/matrix_io.h"
#include "cli/selftest.h"
#include "doctest.h"
#include "json.hpp"

using namespace polytrace;
using namespace polytrace::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("polytrace_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto file = path_ / name;
    std::ofstream(file) << text;
    return file.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("order ranges") {
  CHECK(parse_order_range("3").first == 3);
  CHECK(parse_order_range("3").last == 3);
  CHECK(parse_order_range("1..4").last == 4);
  CHECK(parse_order_range("0:2").first == 0);
  CHECK_THROWS_AS(parse_order_range("4..1"), UsageError);
  CHECK_THROWS_AS(parse_order_range("x"), UsageError);
  CHECK_THROWS_AS(parse_order_range(""), UsageError);
}

TEST_CASE("method names") {
  CHECK(parse_method("closed-form") == Method::closed_form);
  CHECK(parse_method("mc") == Method::mc);
  CHECK(std::string(to_string(Method::umbral)) == "umbral");
  CHECK_THROWS_AS(parse_method("magic"), UsageError);
}

TEST_CASE("CSV matrices round trip") {
  const auto r = parse_matrix_rational("1, 1/2\n-3/4, 2.5\n\n");
  CHECK(r.rows() == 2);
  CHECK(r(0, 1) == ratio(1, 2));
  CHECK(r(1, 1) == ratio(5, 2));
  CHECK(parse_matrix_rational(format_matrix(r)) == r);

  const Matrix<double> d(1, 3, {0.1, 1.0 / 3.0, -2.5e-17});
  const auto back = parse_matrix_double(format_matrix(d));
  for (std::size_t c = 0; c < 3; ++c) CHECK(back(0, c) == d(0, c));
  CHECK(parse_matrix_double("1/3")(0, 0) == 1.0 / 3.0);
  CHECK_THROWS(parse_matrix_rational("1,2\n3\n"));
  CHECK_THROWS(parse_matrix_rational("1,abc\n"));
}

TEST_CASE("compute through the command line") {
  TempDir dir;
  const auto sigma = dir.write("sigma.csv", "1,0\n0,1\n");
  auto r = invoke({"compute", "--method", "closed-form", "--n", "3", "--sigma", sigma, "--i", "2"});
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["schema"] == 1);
  CHECK(doc["results"][0]["exact"] == "6");
  CHECK(doc["results"][0]["value"] == 6.0);

  r = invoke({"compute", "--method", "umbral", "--n", "3", "--p", "3", "--i", "5"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["results"][0]["value"] == 0.0);

  r = invoke({"compute", "--method", "umbral", "--n", "3", "--p", "2", "--i", "0", "--output", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("method,i,value", 0) == 0);
  CHECK(r.out.find("umbral,0,1,1") != std::string::npos);
}

TEST_CASE("monte carlo output is deterministic without timing") {
  const std::vector<std::string> args{"compute", "--method", "mc",      "--n",      "3",          "--p", "2",
                                      "--i",     "1..2",     "--samples", "20000", "--no-timing"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("timing_ms") == std::string::npos);
  CHECK(a.out.find("stderr") != std::string::npos);
}

TEST_CASE("compare and table") {
  TempDir dir;
  const auto sigma = dir.write("sigma.csv", "2,1/2\n1/2,1\n");
  const auto mean = dir.write("m.csv", "1,0,-1\n0,2,1/2\n");
  auto r = invoke({"compare", "--methods", "closed-form,umbral,wick", "--n", "3", "--sigma", sigma, "--m", mean,
                   "--i", "1..2"});
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pass"] == true);
  CHECK(doc["results"].size() == 2);

  r = invoke({"compare", "--methods", "closed-form", "--n", "3", "--p", "2"});
  CHECK(r.code == 1);

  r = invoke({"table", "--n", "3", "--sigma", sigma, "--m", mean, "--output", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("i,closed-form,umbral\n0,1,1\n", 0) == 0);
}

TEST_CASE("exit codes and output files") {
  TempDir dir;
  CHECK(invoke({"compute", "--method", "umbral", "--n", "3", "--sigma", dir.file("missing.csv")}).code == 1);
  CHECK(invoke({"bogus"}).code == 1);
  const auto bad = dir.write("bad.csv", "1,2\n3,1\n");
  const auto out = dir.file("out.json");
  const auto r = invoke({"compute", "--method", "umbral", "--n", "3", "--sigma", bad, "--out", out});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(invoke({"compute", "--method", "umbral", "--n", "1", "--p", "2"}).code == 2);

  const auto good = invoke({"compute", "--method", "umbral", "--n", "3", "--p", "2", "--out", out});
  CHECK(good.code == 0);
  CHECK(good.out.empty());
  CHECK(fs::exists(out));
}

TEST_CASE("selftest subset") {
  const auto r = invoke({"selftest", "--filter", "dewaal", "--json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["schema"] == 1);
  CHECK(invoke({"selftest", "--filter", "no_such_case"}).code == 1);
  const auto table = format_selftest_table(run_selftest("falling_factorial"));
  CHECK(table.find("falling_factorial_identity  PASS") != std::string::npos);
}
