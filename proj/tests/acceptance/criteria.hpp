#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fracflow::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string name;
  /// Wall-clock budget in seconds; 0 means unbounded.
  double budget_s = 0.0;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria();

}  // namespace fracflow::acceptance
