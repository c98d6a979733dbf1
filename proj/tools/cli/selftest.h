#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace polytrace::cli {

struct CheckResult {
  bool pass = false;
  std::size_t cases = 0;
  std::string detail;
};

struct SelfTestCase {
  std::string name;
  std::string title;
  bool statistical = false;
  std::function<CheckResult()> run;
};

/// The embedded acceptance suite, in a fixed order.
const std::vector<SelfTestCase>& selftest_cases();

struct SelfTestRecord {
  std::string name;
  std::string title;
  bool statistical = false;
  CheckResult result;
};

/// Runs every case whose name contains `filter` (all when empty).
std::vector<SelfTestRecord> run_selftest(const std::string& filter = "");

std::string format_selftest_table(const std::vector<SelfTestRecord>& records);
nlohmann::ordered_json selftest_json(const std::vector<SelfTestRecord>& records);

/// 0 when everything passed, 3 when only statistical cases failed, 2 otherwise.
int selftest_exit_code(const std::vector<SelfTestRecord>& records);

}  // namespace polytrace::cli
