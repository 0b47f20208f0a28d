#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fqft {

struct BoundReport {
  std::string name;
  nlohmann::json parameters = nlohmann::json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool pass = false;
  std::size_t trials = 0;
  double tolerance = 0.0;
  std::string relation;
  // Best constant seen over the trials, where a check estimates one.
  double empirical_constant = 0.0;
  nlohmann::json details = nlohmann::json::object();
};

// lhs / rhs, with 0/0 = 0 and x/0 = inf for x > 0.
double safe_ratio(double lhs, double rhs);

nlohmann::json to_json(const BoundReport& r);
bool all_pass(const std::vector<BoundReport>& reports);

}  // namespace fqft
