#pragma once

// Reproducible end-to-end checks shared by the `validate` subcommand and the
// acceptance suite. Each check computes one measured quantity and compares it
// with a pinned threshold.

#include <string>
#include <vector>

namespace scalefree {

struct CheckResult {
  int id = 0;
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string comparison;  // "<=" or ">=" or "=="
  bool passed = false;
  std::string detail;
};

struct CheckInfo {
  int id;
  const char* name;
  double runtime_limit_seconds;  // <= 0 means no limit
};

/// Checks 1..11 in order.
const std::vector<CheckInfo>& check_catalog();

CheckResult run_check(int id);

}  // namespace scalefree
